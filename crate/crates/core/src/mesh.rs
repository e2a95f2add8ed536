//! Triangulated boundary meshes for cap-field sets in n = 3.
//!
//! The lateral boundary of a cap-field set over a radial interval without
//! singular radii is the surface
//!     x(r, phi) = r (cos alpha(r) d(r) + sin alpha(r) e(r, phi)),
//! where e(r, phi) = cos(phi) e(r) + sin(phi) f(r) sweeps the circle
//! orthogonal to the cap axis. The frame (e, f) is propagated along d(r) by
//! projection (rotation-minimizing), which keeps the parametrization free of
//! spurious twist.

use crate::sets::CapFieldSet;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Default)]
pub struct MeshArea {
    /// Total H^2 measure of the meshed surface.
    pub area: f64,
    /// Integral of the tangential normal magnitude |nu_par| over the surface.
    pub tangential: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Area and tangential-split integral of a triangle with vertices a, b, c.
fn triangle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> (f64, f64) {
    let cr = cross(sub(b, a), sub(c, a));
    let area2 = norm(cr);
    if area2 < 1e-300 {
        return (0.0, 0.0);
    }
    let area = 0.5 * area2;
    let nu = [cr[0] / area2, cr[1] / area2, cr[2] / area2];
    let centroid = [
        (a[0] + b[0] + c[0]) / 3.0,
        (a[1] + b[1] + c[1]) / 3.0,
        (a[2] + b[2] + c[2]) / 3.0,
    ];
    let rhat = normalize(centroid);
    let radial = dot(nu, rhat).clamp(-1.0, 1.0);
    (area, area * (1.0 - radial * radial).max(0.0).sqrt())
}

/// Lateral boundary area of a cap-field set over [r_lo, r_hi], assuming no
/// singular radii (profile jumps or direction breaks) in the open interval.
/// `m` radial strips and `m` angular segments.
pub fn lateral_area(e: &CapFieldSet, r_lo: f64, r_hi: f64, m: usize) -> MeshArea {
    assert_eq!(e.profile.n.0, 3, "boundary mesh is n = 3 only");
    if r_hi <= r_lo || m < 2 {
        return MeshArea::default();
    }
    // Evaluate alpha one-sidedly inside the interval so the smooth piece is
    // meshed with its own limits at the ends.
    let rs: Vec<f64> = (0..=m)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / m as f64)
        .collect();
    let alphas: Vec<f64> = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if i == 0 {
                e.profile.side_limits(r).1
            } else {
                e.profile.side_limits(r).0
            }
        })
        .collect();
    let ds: Vec<[f64; 3]> = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let theta = if i == 0 {
                e.direction.planar_angle_right(&e.profile, r)
            } else {
                e.direction.planar_angle(&e.profile, r)
            };
            let phi = e.direction.tilt_angle(&e.profile, r);
            [
                theta.cos() * phi.cos(),
                theta.sin() * phi.cos(),
                phi.sin(),
            ]
        })
        .collect();
    // Rotation-minimizing frame by projection parallel transport.
    let mut es: Vec<[f64; 3]> = Vec::with_capacity(ds.len());
    let d0 = ds[0];
    let seed = if d0[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let p0 = dot(seed, d0);
    let mut ecur = normalize([
        seed[0] - p0 * d0[0],
        seed[1] - p0 * d0[1],
        seed[2] - p0 * d0[2],
    ]);
    es.push(ecur);
    for d in ds.iter().skip(1) {
        let p = dot(ecur, *d);
        ecur = normalize([ecur[0] - p * d[0], ecur[1] - p * d[1], ecur[2] - p * d[2]]);
        es.push(ecur);
    }
    let fs: Vec<[f64; 3]> = ds.iter().zip(&es).map(|(d, e)| cross(*d, *e)).collect();

    let point = |i: usize, j: usize| -> [f64; 3] {
        let r = rs[i];
        let (sa, ca) = alphas[i].sin_cos();
        let phi = 2.0 * PI * j as f64 / m as f64;
        let (sp, cp) = phi.sin_cos();
        let d = ds[i];
        let ev = es[i];
        let fv = fs[i];
        [
            r * (ca * d[0] + sa * (cp * ev[0] + sp * fv[0])),
            r * (ca * d[1] + sa * (cp * ev[1] + sp * fv[1])),
            r * (ca * d[2] + sa * (cp * ev[2] + sp * fv[2])),
        ]
    };

    let strips: Vec<MeshArea> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = MeshArea::default();
            for j in 0..m {
                let j1 = (j + 1) % m;
                let a = point(i, j);
                let b = point(i + 1, j);
                let c = point(i + 1, j1);
                let d = point(i, j1);
                for (ar, tg) in [triangle(a, b, c), triangle(a, c, d)] {
                    acc.area += ar;
                    acc.tangential += tg;
                }
            }
            acc
        })
        .collect();
    let mut total = MeshArea::default();
    for s in strips {
        total.area += s.area;
        total.tangential += s.tangential;
    }
    total
}
