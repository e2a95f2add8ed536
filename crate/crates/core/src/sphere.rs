//! Geodesic balls and spheres on S^{n-1}: exact measures for n in {2, 3},
//! adaptive quadrature for general n, and the cap-area inversion.

use crate::error::{Error, Result};
use crate::quad;
use std::f64::consts::PI;

/// Tolerance accepted on |x| = 1 for direction inputs.
pub const UNIT_TOL: f64 = 1e-9;
/// Tolerance of the cap-area inversion on beta.
pub const INV_TOL: f64 = 1e-12;

/// Ambient dimension n >= 2 of R^n; slices live on S^{n-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Dimension(pub u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// n * omega_n, the H^{n-1} measure of S^{n-1}.
    pub fn sphere_surface(self) -> f64 {
        let n = self.0 as f64;
        n * unit_ball_volume(self.0)
    }
}

// omega_k for k <= 8; beyond that the two-step recurrence
// omega_k = 2 pi / k * omega_{k-2} is exact.
#[allow(clippy::excessive_precision)] // full published digits
const OMEGA_TABLE: [f64; 9] = [
    1.0,
    2.0,
    PI,
    4.18879020478639098461685784437267, // 4 pi / 3
    4.93480220054467930941724549993807, // pi^2 / 2
    5.26378901391432485658906720475668, // 8 pi^2 / 15
    5.16771278004997025590022268466047, // pi^3 / 6
    4.72476597033140563155613168526007, // 16 pi^3 / 105
    4.05871212641676541583208836482695, // pi^4 / 24
];

/// Volume omega_k of the unit ball in R^k.
pub fn unit_ball_volume(k: u32) -> f64 {
    if (k as usize) < OMEGA_TABLE.len() {
        return OMEGA_TABLE[k as usize];
    }
    let mut v = OMEGA_TABLE[if k.is_multiple_of(2) { 8 } else { 7 }];
    let mut m = if k.is_multiple_of(2) { 8 } else { 7 };
    while m < k {
        m += 2;
        v *= 2.0 * PI / m as f64;
    }
    v
}

fn check_unit(x: &[f64], name: &str) -> Result<()> {
    let norm2: f64 = x.iter().map(|c| c * c).sum();
    if (norm2.sqrt() - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!(
            "{name} is not a unit vector (|{name}| = {})",
            norm2.sqrt()
        )));
    }
    Ok(())
}

/// Geodesic distance arccos(x . y) between unit vectors; in [0, pi].
pub fn geodesic_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid("geodesic_distance: dimension mismatch"));
    }
    check_unit(x, "x")?;
    check_unit(y, "y")?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(dot.clamp(-1.0, 1.0).acos())
}

/// Open geodesic ball of centre r*p and geodesic radius beta on the sphere
/// of radius r.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct GeodesicCap {
    pub r: f64,
    pub beta: f64,
    pub center: Vec<f64>,
}

impl GeodesicCap {
    pub fn new(r: f64, beta: f64, center: Vec<f64>) -> Result<Self> {
        if r <= 0.0 {
            return Err(Error::invalid("cap radius must be positive"));
        }
        if !(0.0..=PI).contains(&beta) {
            return Err(Error::invalid(format!("cap angle {beta} outside [0, pi]")));
        }
        let norm2: f64 = center.iter().map(|c| c * c).sum();
        if (norm2.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("cap center must be a unit vector"));
        }
        Ok(GeodesicCap { r, beta, center })
    }

    pub fn area(&self, n: Dimension) -> Result<f64> {
        cap_area(n, self.r, self.beta)
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(geodesic_distance(x, &self.center)? < self.beta)
    }
}

/// H^{n-1} measure of a geodesic ball of radius beta on the sphere of
/// radius r: (n-1) omega_{n-1} r^{n-1} int_0^beta sin^{n-2}.
pub fn cap_area(n: Dimension, r: f64, beta: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::invalid("cap_area: r must be positive"));
    }
    if !(-1e-12..=PI + 1e-12).contains(&beta) {
        return Err(Error::invalid(format!("cap_area: beta {beta} outside [0, pi]")));
    }
    let beta = beta.clamp(0.0, PI);
    let rp = r.powi(n.0 as i32 - 1);
    Ok(match n.0 {
        2 => 2.0 * rp * beta,
        3 => 2.0 * PI * rp * (1.0 - beta.cos()),
        _ => {
            let m = n.0 as i32 - 2;
            let c = (n.0 as f64 - 1.0) * unit_ball_volume(n.0 - 1) * rp;
            c * quad::integrate(|t| t.sin().powi(m), 0.0, beta, 1e-12)
        }
    })
}

/// H^{n-2} measure of the geodesic sphere of radius beta on the sphere of
/// radius r: (n-1) omega_{n-1} r^{n-2} (sin beta)^{n-2}.
///
/// For n = 2 the boundary of a proper arc is two points (H^0 = 2); at
/// beta in {0, pi} the boundary set is empty and the measure is 0.
pub fn sphere_measure(n: Dimension, r: f64, beta: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::invalid("sphere_measure: r must be positive"));
    }
    if !(-1e-12..=PI + 1e-12).contains(&beta) {
        return Err(Error::invalid(format!(
            "sphere_measure: beta {beta} outside [0, pi]"
        )));
    }
    let beta = beta.clamp(0.0, PI);
    if n.0 == 2 {
        return Ok(if beta == 0.0 || beta == PI { 0.0 } else { 2.0 });
    }
    let rp = r.powi(n.0 as i32 - 2);
    Ok((n.0 as f64 - 1.0) * unit_ball_volume(n.0 - 1) * rp * beta.sin().powi(n.0 as i32 - 2))
}

/// Normalised cap area xi(alpha) = cap_area(n, 1, alpha); range [0, n omega_n].
pub fn xi_from_alpha(n: Dimension, alpha: f64) -> Result<f64> {
    cap_area(n, 1.0, alpha)
}

/// d/dalpha xi_from_alpha = sphere_measure(n, 1, alpha) for n >= 3; for
/// n = 2 the derivative is identically 2 (xi = 2 alpha).
pub fn dxi_dalpha(n: Dimension, alpha: f64) -> f64 {
    if n.0 == 2 {
        2.0
    } else {
        let a = alpha.clamp(0.0, PI);
        (n.0 as f64 - 1.0) * unit_ball_volume(n.0 - 1) * a.sin().powi(n.0 as i32 - 2)
    }
}

/// Inverse of xi_from_alpha: the unique alpha in [0, pi] with
/// cap_area(n, 1, alpha) = xi. Bracketed Newton with bisection fallback;
/// the derivative vanishes at both endpoints, so Newton alone is unsafe.
pub fn alpha_from_xi(n: Dimension, xi: f64) -> Result<f64> {
    let total = n.sphere_surface();
    if xi < -1e-12 || xi > total + 1e-12 {
        return Err(Error::invalid(format!(
            "alpha_from_xi: xi {xi} outside [0, {total}]"
        )));
    }
    let xi = xi.clamp(0.0, total);
    if n.0 == 2 {
        return Ok(xi / 2.0);
    }
    if n.0 == 3 {
        return Ok((1.0 - xi / (2.0 * PI)).clamp(-1.0, 1.0).acos());
    }
    if xi == 0.0 {
        return Ok(0.0);
    }
    if xi == total {
        return Ok(PI);
    }
    let f = |a: f64| cap_area(n, 1.0, a).unwrap() - xi;
    let mut lo = 0.0f64;
    let mut hi = PI;
    let mut a = PI * xi / total; // crude but bracketed initial guess
    for _ in 0..200 {
        let fa = f(a);
        if fa > 0.0 {
            hi = a;
        } else {
            lo = a;
        }
        let d = dxi_dalpha(n, a);
        let mut next = if d > 1e-14 { a - fa / d } else { f64::NAN };
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - a).abs() < INV_TOL {
            return Ok(next);
        }
        a = next;
    }
    Ok(a)
}

/// H^{n-1} measure of the intersection of two geodesic caps on the sphere of
/// radius r, with geodesic radii b1, b2 and centers `delta` apart.
pub fn cap_intersection_area(n: Dimension, r: f64, b1: f64, b2: f64, delta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&delta) {
        return Err(Error::invalid("cap_intersection_area: delta outside [0, pi]"));
    }
    let b1 = b1.clamp(0.0, PI);
    let b2 = b2.clamp(0.0, PI);
    // Containment / disjointness resolved first; the lens formulas below
    // assume proper crossing.
    if delta <= (b1 - b2).abs() {
        return cap_area(n, r, b1.min(b2));
    }
    if delta >= b1 + b2 {
        // Both caps can still cover the sphere jointly through the far side.
        if delta >= 2.0 * PI - b1 - b2 {
            return Ok(cap_area(n, r, b1)? + cap_area(n, r, b2)? - n.sphere_surface() * r.powi(n.0 as i32 - 1));
        }
        return Ok(0.0);
    }
    match n.0 {
        2 => {
            // Arc overlap: each "cap" is an arc of half-width b_i. The arcs
            // can meet on the near side and, if they jointly wrap the circle,
            // a second time on the far side.
            let near = (b1 + b2 - delta).max(0.0);
            let far = (b1 + b2 - (2.0 * PI - delta)).max(0.0);
            Ok(r * (near + far).min(2.0 * b1.min(b2)))
        }
        3 => {
            // Spherical lens on S^2, scaled by r^2.
            let (s1, c1) = b1.sin_cos();
            let (s2, c2) = b2.sin_cos();
            let (sd, cd) = delta.sin_cos();
            let acos_c = |x: f64| x.clamp(-1.0, 1.0).acos();
            let a1 = acos_c((c2 - c1 * cd) / (s1 * sd));
            let a2 = acos_c((c1 - c2 * cd) / (s2 * sd));
            let a0 = acos_c((cd - c1 * c2) / (s1 * s2));
            Ok(r * r * 2.0 * (PI - a1 * c1 - a2 * c2 - a0))
        }
        _ => Err(Error::invalid(
            "cap_intersection_area: only n in {2, 3} supported",
        )),
    }
}
