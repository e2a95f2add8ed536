//! Perimeter engines: the exact radial formula for symmetrals, the boundary
//! engine for cap-field sets (closed curves in n = 2, triangulated mesh in
//! n = 3), and the symmetrisation-inequality checker.
//!
//! Radial windows are half-open [lo, hi): a singular contribution at radius
//! r is counted when lo <= r < hi, which makes reports exactly additive
//! across disjoint windows. The default window (0, inf) covers everything,
//! including the implicit boundary jumps at the profile's window endpoints.

use crate::error::{Error, Result};
use crate::mesh;
use crate::profile::{Jump, Profile};
use crate::quad;
use crate::sets::CapFieldSet;
use crate::sphere::{self, Dimension};
use serde::Serialize;
use std::f64::consts::PI;

/// Angles within this distance of 0 or pi are treated as degenerate shells:
/// the slice boundary is empty and the rescaled derivative vanishes there.
pub const DEGENERATE_ALPHA: f64 = 1e-12;

/// Documented error budgets per engine, used by the inequality verdict.
pub mod eps_budget {
    /// Exact radial formula: absolute.
    pub const FORMULA_ABS: f64 = 1e-9;
    /// n = 2 cap-field boundary engine: relative.
    pub const CAPFIELD_2D_REL: f64 = 1e-6;
    /// n = 3 cap-field mesh at the default 512^2 resolution: relative.
    pub const CAPFIELD_3D_REL: f64 = 2e-3;
    /// Voxel contour engine: 5 h times the perimeter estimate.
    pub const VOXEL_H_FACTOR: f64 = 5.0;
}

/// Per-shell integrand sample of the radial perimeter formula.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShellSample {
    pub r: f64,
    /// Tangential density p(r) = H^{n-2} of the slice boundary.
    pub p: f64,
    /// Rescaled AC derivative r^{n-1} xi_v'(r).
    pub rescaled_slope: f64,
    /// sqrt(p^2 + (r^{n-1} xi')^2).
    pub integrand: f64,
    /// Perimeter accumulated on [lo, r).
    pub cumulative: f64,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct PerimeterReport {
    pub total: f64,
    /// Absolutely continuous part of the radial formula (or mesh area of the
    /// smooth boundary pieces for the cap-field engine).
    pub ac_part: f64,
    /// Jump + Cantor contribution.
    pub singular_part: f64,
    /// Integral of |nu_par| over the boundary (equals the integral of p(r)).
    pub tangential_total: f64,
    pub per_shell: Vec<ShellSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub p_e: f64,
    pub p_fv: f64,
    /// P(E) - P(F_v); the inequality asserts this is >= 0.
    pub slack: f64,
    pub eps_budget: f64,
    pub verdict: Verdict,
}

fn window_clamp(b: (f64, f64)) -> (f64, f64) {
    (b.0, b.1.max(b.0))
}

fn in_window(b: (f64, f64), r: f64) -> bool {
    b.0 <= r && r < b.1
}

fn degenerate(alpha: f64) -> bool {
    !(DEGENERATE_ALPHA..=PI - DEGENERATE_ALPHA).contains(&alpha)
}

/// All singular radii of the radial formula: the implicit boundary jumps at
/// the window endpoints plus the declared interior jumps of xi_v.
fn xi_jumps_with_boundary(p: &Profile) -> Vec<Jump> {
    let first = p.alpha.right_limit(p.grid.r_min).clamp(0.0, PI);
    let last = p.alpha.left_limit(p.grid.r_max).clamp(0.0, PI);
    let mut jumps = Vec::with_capacity(p.alpha.jumps.len() + 2);
    jumps.push(Jump {
        r: p.grid.r_min,
        left: 0.0,
        right: sphere::xi_from_alpha(p.n, first).unwrap(),
    });
    jumps.extend(p.xi_jumps());
    jumps.push(Jump {
        r: p.grid.r_max,
        left: sphere::xi_from_alpha(p.n, last).unwrap(),
        right: 0.0,
    });
    jumps
}

/// Exact perimeter of the spherical symmetral F_v over the radial window B:
///     P = int_B sqrt(p(r)^2 + (r^{n-1} xi_v'(r))^2) dr
///       + sum of r_j^{n-1} |xi jump| + int_B r^{n-1} d|D^c xi_v|,
/// with p(r) = sphere_measure(n, r, alpha_v(r)) and p = xi' = 0 on the
/// degenerate set {alpha in {0, pi}}.
pub fn perimeter_symmetral(p: &Profile, b: (f64, f64)) -> PerimeterReport {
    let b = window_clamp(b);
    let n = p.n;
    let npow = n.0 as i32 - 1;
    let integrand = |r: f64| {
        let alpha = p.alpha(r);
        if degenerate(alpha) {
            return 0.0;
        }
        let pr = sphere::sphere_measure(n, r, alpha).unwrap();
        let slope = r.powi(npow) * p.xi_ac_slope(r);
        (pr * pr + slope * slope).sqrt()
    };
    let tangential = |r: f64| {
        let alpha = p.alpha(r);
        if degenerate(alpha) {
            0.0
        } else {
            sphere::sphere_measure(n, r, alpha).unwrap()
        }
    };

    // AC part: fixed-order Gauss panels per grid interval (the integrand is
    // smooth inside each interval; panel boundaries at nodes keep reports
    // additive across node-aligned splits). Interior jump radii split their
    // panel further: alpha (hence p and the chain-rule factor) changes
    // discontinuously across a jump.
    let grid = p.grid;
    let mut ac = 0.0;
    let mut tang = 0.0;
    let mut ac_by_node = vec![0.0; grid.count]; // AC accumulated up to node i
    for i in 0..grid.count - 1 {
        let lo = grid.node(i).max(b.0);
        let hi = grid.node(i + 1).min(b.1);
        if hi > lo {
            let mut cuts = vec![lo];
            cuts.extend(
                p.alpha
                    .jumps
                    .iter()
                    .map(|j| j.r)
                    .filter(|&r| r > lo && r < hi),
            );
            cuts.push(hi);
            for w in cuts.windows(2) {
                ac += quad::gauss7(integrand, w[0], w[1]);
                tang += quad::gauss7(tangential, w[0], w[1]);
            }
        }
        ac_by_node[i + 1] = ac;
    }

    // Jumps (boundary + interior), half-open window convention.
    let jumps = xi_jumps_with_boundary(p);
    let mut jump_sum = 0.0;
    for j in &jumps {
        if in_window(b, j.r) {
            jump_sum += j.r.powi(npow) * (j.right - j.left).abs();
        }
    }

    // Cantor part, restricted to the window.
    let cantor = p.xi_cantor_integral(|r| if in_window(b, r) { r.powi(npow) } else { 0.0 });

    // Per-shell trace with cumulative totals at the nodes.
    let mut per_shell = Vec::with_capacity(grid.count);
    let cantor_pts: Vec<(f64, f64)> = match &p.alpha.cantor {
        Some(c) => c
            .quad_points()
            .map(|(r, w)| (r, w * sphere::dxi_dalpha(n, p.alpha(r)) * r.powi(npow)))
            .collect(),
        None => Vec::new(),
    };
    for (i, &ac_cumulative) in ac_by_node.iter().enumerate() {
        let r = grid.node(i);
        let alpha = p.alpha(r);
        let (pr, slope) = if degenerate(alpha) {
            (0.0, 0.0)
        } else {
            (
                sphere::sphere_measure(n, r, alpha).unwrap(),
                r.powi(npow) * p.xi_ac_slope(r.min(grid.r_max - 1e-12 * grid.h())),
            )
        };
        let jumps_before: f64 = jumps
            .iter()
            .filter(|j| in_window(b, j.r) && j.r < r)
            .map(|j| j.r.powi(npow) * (j.right - j.left).abs())
            .sum();
        let cantor_before: f64 = cantor_pts
            .iter()
            .filter(|(rc, _)| in_window(b, *rc) && *rc < r)
            .map(|(_, w)| w)
            .sum();
        per_shell.push(ShellSample {
            r,
            p: pr,
            rescaled_slope: slope,
            integrand: (pr * pr + slope * slope).sqrt(),
            cumulative: ac_cumulative + jumps_before + cantor_before,
        });
    }

    let singular = jump_sum + cantor;
    PerimeterReport {
        total: ac + singular,
        ac_part: ac,
        singular_part: singular,
        tangential_total: tang,
        per_shell,
    }
}

/// Slice symmetric-difference measure at a singular radius: the slices on
/// the two sides are caps of half-angles a_left, a_right whose centers are
/// `delta` apart. This is the H^{n-1} measure of the jump's contribution to
/// the reduced boundary on the sphere of radius r.
pub fn slice_jump_measure(
    n: Dimension,
    r: f64,
    a_left: f64,
    a_right: f64,
    delta: f64,
) -> Result<f64> {
    let a_left = a_left.clamp(0.0, PI);
    let a_right = a_right.clamp(0.0, PI);
    let delta = delta.abs().min(PI);
    let inter = sphere::cap_intersection_area(n, r, a_left, a_right, delta)?;
    Ok((sphere::cap_area(n, r, a_left)? + sphere::cap_area(n, r, a_right)? - 2.0 * inter)
        .max(0.0))
}

/// All singular radii of a cap-field set within the profile window:
/// (radius, alpha left, alpha right, direction distance across the radius).
fn capfield_singular_radii(e: &CapFieldSet) -> Vec<(f64, f64, f64, f64)> {
    let p = &e.profile;
    let mut radii: Vec<f64> = vec![p.grid.r_min, p.grid.r_max];
    radii.extend(p.alpha.jumps.iter().map(|j| j.r));
    radii.extend(e.direction.jump_radii().iter().map(|(r, _)| *r));
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    radii
        .iter()
        .map(|&r| {
            let (al, ar) = if r <= p.grid.r_min {
                (0.0, p.side_limits(r).1)
            } else if r >= p.grid.r_max {
                (p.side_limits(r).0, 0.0)
            } else {
                p.side_limits(r)
            };
            let tl = e.direction.planar_angle(p, r.max(p.grid.r_min + 0.0));
            let tr = e.direction.planar_angle_right(p, r);
            // Planar rotations: the geodesic distance between the two cap
            // centers is the wrapped angle difference.
            let mut delta = (tr - tl).abs() % (2.0 * PI);
            if delta > PI {
                delta = 2.0 * PI - delta;
            }
            (r, al, ar, delta)
        })
        .collect()
}

/// Perimeter of a cap-field set over the radial window B.
///
/// n = 2: the boundary consists of the two curves theta_c(r) +- alpha(r) on
/// {0 < alpha < pi}, measured exactly; singular radii contribute the slice
/// symmetric difference; a shared Cantor staircase in (alpha, theta_c)
/// contributes r (|lambda + 1| + |lambda - 1|) d|D^c alpha|.
///
/// n = 3: smooth pieces are meshed (rotation-minimizing frame, `mesh_m`^2
/// triangles per piece); singular radii use the closed-form spherical lens;
/// Cantor flows require lambda <= 1, where the singular rate coincides with
/// the symmetral's r^2 d|D^c xi|.
pub fn perimeter_capfield(e: &CapFieldSet, b: (f64, f64), mesh_m: usize) -> Result<PerimeterReport> {
    let p = &e.profile;
    let n = p.n;
    let b = window_clamp(b);
    if !(2..=3).contains(&n.0) {
        return Err(Error::invalid("cap-field perimeter supports n in {2, 3}"));
    }

    // Singular contributions.
    let mut singular = 0.0;
    let singulars = capfield_singular_radii(e);
    for &(r, al, ar, delta) in &singulars {
        if in_window(b, r) {
            singular += slice_jump_measure(n, r, al, ar, delta)?;
        }
    }

    // Cantor part.
    if let Some(c) = &p.alpha.cantor {
        if c.scale != 0.0 {
            let lambda = e.direction.cantor_coefficient();
            if n.0 == 3 && lambda > 1.0 {
                return Err(Error::invalid(
                    "n = 3 cantor-flow perimeter requires lambda <= 1",
                ));
            }
            singular += match n.0 {
                2 => {
                    let coeff = (lambda + 1.0).abs() + (lambda - 1.0).abs();
                    c.integral(|r| if in_window(b, r) { coeff * r } else { 0.0 })
                }
                _ => p.xi_cantor_integral(|r| if in_window(b, r) { r * r } else { 0.0 }),
            };
        }
    }

    // AC part over smooth pieces between singular radii.
    let piece_edges: Vec<f64> = singulars.iter().map(|s| s.0).collect();
    let mut ac = 0.0;
    let mut tang = 0.0;
    match n.0 {
        2 => {
            let integrand = |r: f64| {
                let alpha = p.alpha(r);
                if degenerate(alpha) {
                    return 0.0;
                }
                let tc = e.direction.planar_angle_slope(p, r);
                let aa = p.alpha_ac_slope(r);
                let up = 1.0 + r * r * (tc + aa) * (tc + aa);
                let dn = 1.0 + r * r * (tc - aa) * (tc - aa);
                up.sqrt() + dn.sqrt()
            };
            let tangential = |r: f64| {
                let alpha = p.alpha(r);
                if degenerate(alpha) {
                    0.0
                } else {
                    2.0
                }
            };
            // Integrate per grid interval, split additionally at interior
            // singular radii so each panel is smooth.
            let grid = p.grid;
            for i in 0..grid.count - 1 {
                let mut cuts = vec![grid.node(i).max(b.0)];
                for &s in &piece_edges {
                    if s > cuts[0] && s < grid.node(i + 1).min(b.1) {
                        cuts.push(s);
                    }
                }
                cuts.push(grid.node(i + 1).min(b.1));
                for w in cuts.windows(2) {
                    if w[1] > w[0] {
                        ac += quad::gauss7(integrand, w[0], w[1]);
                        tang += quad::gauss7(tangential, w[0], w[1]);
                    }
                }
            }
        }
        _ => {
            for w in piece_edges.windows(2) {
                let lo = w[0].max(b.0);
                let hi = w[1].min(b.1.min(p.grid.r_max));
                if hi > lo {
                    let m = mesh::lateral_area(e, lo, hi, mesh_m);
                    ac += m.area;
                    tang += m.tangential;
                }
            }
        }
    }

    Ok(PerimeterReport {
        total: ac + singular,
        ac_part: ac,
        singular_part: singular,
        tangential_total: tang,
        per_shell: Vec::new(),
    })
}

/// Error budget of the cap-field engine for a given set.
pub fn capfield_eps_budget(e: &CapFieldSet, p_estimate: f64) -> f64 {
    match e.profile.n.0 {
        2 => (eps_budget::CAPFIELD_2D_REL * p_estimate).max(eps_budget::FORMULA_ABS),
        _ => eps_budget::CAPFIELD_3D_REL * p_estimate,
    }
}

/// Check the symmetrisation inequality P(E) >= P(F_v) over the window B for
/// a cap-field set, evaluating both sides and comparing against the engine's
/// documented error budget.
pub fn check_inequality(e: &CapFieldSet, b: (f64, f64), mesh_m: usize) -> Result<InequalityReport> {
    let p_fv = perimeter_symmetral(&e.profile, b).total;
    let p_e = perimeter_capfield(e, b, mesh_m)?.total;
    let eps = capfield_eps_budget(e, p_e.max(p_fv));
    let slack = p_e - p_fv;
    Ok(InequalityReport {
        p_e,
        p_fv,
        slack,
        eps_budget: eps,
        verdict: if slack >= -eps {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
    })
}
