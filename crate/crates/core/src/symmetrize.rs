//! Symmetrisation operators: spherical symmetrisation of voxel sets, circular
//! symmetrisation (n in {2, 3}), and the iterated-circular construction that
//! recovers the spherical symmetral.

use crate::error::{Error, Result};
use crate::perimeter::{self, PerimeterReport};
use crate::profile::{make_profile, BVSpec, Profile, RadialGrid};
use crate::sets::{symmetral_from_profile, CapFieldSet, VoxelSet};
use crate::sphere::{alpha_from_xi, Dimension};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default stratified samples per shell / circle.
pub const DEFAULT_SHELL_SAMPLES: usize = 4096;

/// Measure the slice distribution of a voxel set and build its spherical
/// symmetral F_v: per shell r_i, v(r_i) by stratified sampling, mapped to the
/// cap half-angle through the cap-area inversion.
pub fn spherical_symmetrize(
    v: &VoxelSet,
    count: usize,
    m: usize,
    seed: u64,
) -> Result<(Profile, CapFieldSet)> {
    let r_max = v.extent() * (1.0 - 1e-9);
    let r_min = 0.5 * v.h;
    let grid = RadialGrid::new(r_min, r_max, count)?;
    let n = v.n;
    let total = |r: f64| n.sphere_surface() * r.powi(n.0 as i32 - 1);
    let alphas: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let r = grid.node(i);
            let vi = v.slice_measure(r, m, seed.wrapping_add(i as u64));
            let xi = (vi / r.powi(n.0 as i32 - 1)).clamp(0.0, total(1.0));
            alpha_from_xi(n, xi).unwrap()
        })
        .collect();
    let p = make_profile(
        n,
        grid,
        BVSpec {
            ac_samples: alphas,
            ..Default::default()
        },
    )?;
    let fv = symmetral_from_profile(&p);
    Ok((p, fv))
}

/// Circular distribution: the length ell(rho, z) of the slice of E along the
/// circle of radius rho in the `axes` plane at transverse coordinate z.
/// For n = 2 the transverse grid is trivial (one row, z = 0) and
/// ell = 2 r alpha.
#[derive(Debug, Clone)]
pub struct CircularProfile {
    pub n: Dimension,
    /// Indices of the two coordinate axes spanning the circle planes.
    pub axes: (usize, usize),
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_count: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub z_count: usize,
    /// ell[j * rho_count + i] at (rho_i, z_j), in [0, 2 pi rho_i].
    pub ell: Vec<f64>,
}

impl CircularProfile {
    pub fn rho(&self, i: usize) -> f64 {
        self.rho_min + (self.rho_max - self.rho_min) * i as f64 / (self.rho_count - 1) as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        if self.z_count == 1 {
            0.0
        } else {
            self.z_min + (self.z_max - self.z_min) * j as f64 / (self.z_count - 1) as f64
        }
    }

    pub fn ell_at(&self, i: usize, j: usize) -> f64 {
        self.ell[j * self.rho_count + i]
    }

    /// Half-angle alpha^ell = ell / (2 rho) in [0, pi].
    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        (self.ell_at(i, j) / (2.0 * self.rho(i))).clamp(0.0, PI)
    }

    /// For n = 2, the circular distribution of a radial profile:
    /// ell(r) = 2 r alpha(r) sampled at the grid nodes. Requires a purely
    /// absolutely continuous profile (the sampled representation has no jump
    /// or Cantor channel).
    pub fn from_profile(p: &Profile) -> Result<Self> {
        if p.n.0 != 2 {
            return Err(Error::invalid("from_profile applies to n = 2 only"));
        }
        if !p.alpha.jumps.is_empty() || p.alpha.cantor.is_some() {
            return Err(Error::invalid(
                "circular sampling supports AC profiles only",
            ));
        }
        Ok(CircularProfile {
            n: p.n,
            axes: (0, 1),
            rho_min: p.grid.r_min,
            rho_max: p.grid.r_max,
            rho_count: p.grid.count,
            z_min: 0.0,
            z_max: 0.0,
            z_count: 1,
            ell: (0..p.grid.count)
                .map(|i| {
                    let r = p.grid.node(i);
                    2.0 * r * p.alpha(r)
                })
                .collect(),
        })
    }

    /// For n = 2, reinterpret as a radial profile (the two notions coincide).
    pub fn to_profile(&self) -> Result<Profile> {
        if self.n.0 != 2 {
            return Err(Error::invalid("to_profile applies to n = 2 only"));
        }
        let grid = RadialGrid::new(self.rho_min, self.rho_max, self.rho_count)?;
        make_profile(
            self.n,
            grid,
            BVSpec {
                ac_samples: (0..self.rho_count).map(|i| self.alpha(i, 0)).collect(),
                ..Default::default()
            },
        )
    }
}

fn axes_unit(axes: (usize, usize), n: Dimension) -> Result<usize> {
    let nn = n.0 as usize;
    if axes.0 >= nn || axes.1 >= nn || axes.0 == axes.1 {
        return Err(Error::invalid(format!(
            "axes ({}, {}) invalid for n = {}",
            axes.0, axes.1, n.0
        )));
    }
    // The transverse axis (n = 3): the one not in the pair.
    Ok((0..nn).find(|a| *a != axes.0 && *a != axes.1).unwrap_or(2))
}

/// Circular symmetrisation of a voxel set with respect to a coordinate plane:
/// each circular slice is replaced by the arc of equal length centered on the
/// positive `axes.0` direction. Returns the measured circular distribution
/// and the rasterized symmetral F^ell on the input grid.
pub fn circular_symmetrize(
    v: &VoxelSet,
    axes: (usize, usize),
    m: usize,
) -> Result<(CircularProfile, VoxelSet)> {
    let n = v.n;
    let trans = axes_unit(axes, n)?;
    let h = v.h;
    let rho_max = v.extent() * (1.0 - 1e-9);
    let rho_count = (rho_max / h).floor() as usize;
    if rho_count < 2 {
        return Err(Error::invalid("voxel grid too coarse for circular slicing"));
    }
    let (z_min, z_max, z_count) = if n.0 == 2 {
        (0.0, 0.0, 1)
    } else {
        let half = v.dims[trans] as f64 / 2.0 * h;
        (-half + 0.5 * h, half - 0.5 * h, v.dims[trans])
    };
    let mut cp = CircularProfile {
        n,
        axes,
        rho_min: 0.5 * h,
        rho_max,
        rho_count,
        z_min,
        z_max,
        z_count,
        ell: vec![0.0; rho_count * z_count],
    };
    let rho_of = |i: usize| {
        cp.rho_min + (rho_max - cp.rho_min) * i as f64 / (rho_count - 1) as f64
    };
    let ell: Vec<f64> = (0..rho_count * z_count)
        .into_par_iter()
        .map(|idx| {
            let j = idx / rho_count;
            let i = idx % rho_count;
            let rho = rho_of(i);
            let z = if z_count == 1 {
                0.0
            } else {
                z_min + (z_max - z_min) * j as f64 / (z_count - 1) as f64
            };
            let mut hits = 0usize;
            for s in 0..m {
                let phi = 2.0 * PI * (s as f64 + 0.5) / m as f64;
                let mut x = [0.0f64; 3];
                x[axes.0] = rho * phi.cos();
                x[axes.1] = rho * phi.sin();
                if n.0 == 3 {
                    x[trans] = z;
                }
                if v.contains(&x[..n.0 as usize]) {
                    hits += 1;
                }
            }
            hits as f64 / m as f64 * 2.0 * PI * rho
        })
        .collect();
    cp.ell = ell;

    // Rasterize the centered-arc set on the same grid.
    let cpr = &cp;
    let out = VoxelSet::from_indicator(n, h, v.dims, move |x| {
        let xa = x[axes.0];
        let xb = x[axes.1];
        let rho = (xa * xa + xb * xb).sqrt();
        if rho < cpr.rho_min || rho > cpr.rho_max {
            return false;
        }
        let i = (((rho - cpr.rho_min) / (cpr.rho_max - cpr.rho_min))
            * (rho_count - 1) as f64)
            .round() as usize;
        let j = if cpr.z_count == 1 {
            0
        } else {
            let z = x[trans];
            let t = ((z - cpr.z_min) / (cpr.z_max - cpr.z_min)) * (cpr.z_count - 1) as f64;
            if t < -0.5 || t > cpr.z_count as f64 - 0.5 {
                return false;
            }
            t.round().clamp(0.0, (cpr.z_count - 1) as f64) as usize
        };
        let half_angle = cpr.ell_at(i.min(rho_count - 1), j) / (2.0 * rho);
        xb.atan2(xa).abs() < half_angle
    })?;
    Ok((cp, out))
}

/// Iterated circular symmetrisation of a cap-field set in n = 3: rasterize,
/// symmetrize with respect to (e1, e2), then (e1, e3). For sets whose
/// spherical slices are caps the result approximates the spherical symmetral
/// F_v.
pub fn iterate_circular(e: &CapFieldSet, h: f64, m: usize) -> Result<VoxelSet> {
    if e.n().0 != 3 {
        return Err(Error::invalid("iterate_circular requires n = 3"));
    }
    let v0 = e.rasterize(h)?;
    let (_, v1) = circular_symmetrize(&v0, (0, 1), m)?;
    let (_, v2) = circular_symmetrize(&v1, (0, 2), m)?;
    Ok(v2)
}

/// Perimeter of the circular symmetral F^ell.
///
/// n = 2: coincides with the spherical engine on the shared profile.
///
/// n = 3: grid evaluation of
///     int int sqrt(p^2 + (rho d/drho (ell/rho))^2 + (d/dz ell)^2) drho dz
/// on a box-smoothed ell field; jump structure (the set's boundary circles)
/// is captured by the smoothed gradient, so the report carries everything in
/// `ac_part`. The tangential density p is 2 on proper arcs, 0 on full or
/// empty circles.
pub fn perimeter_circular_symmetral(cp: &CircularProfile) -> Result<PerimeterReport> {
    if cp.n.0 == 2 {
        let p = cp.to_profile()?;
        return Ok(perimeter::perimeter_symmetral(&p, (0.0, f64::INFINITY)));
    }
    let (ni, nj) = (cp.rho_count, cp.z_count);
    if ni < 3 || nj < 3 {
        return Err(Error::invalid("circular grid too small"));
    }
    let h_rho = (cp.rho_max - cp.rho_min) / (ni - 1) as f64;
    let h_z = (cp.z_max - cp.z_min) / (nj - 1) as f64;
    // One pass of 3x3 box smoothing regularizes the jump set so central
    // differences capture its full variation.
    let mut field = vec![0.0f64; ni * nj];
    for j in 0..nj {
        for i in 0..ni {
            let mut sum = 0.0;
            let mut cnt = 0.0;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let jj = j as i64 + dj;
                    let ii = i as i64 + di;
                    // Outside the grid the distribution is 0 (also below
                    // rho_min, a measure-zero sliver).
                    let val = if jj < 0 || jj >= nj as i64 || ii < 0 || ii >= ni as i64 {
                        0.0
                    } else {
                        cp.ell_at(ii as usize, jj as usize)
                    };
                    sum += val;
                    cnt += 1.0;
                }
            }
            field[j * ni + i] = sum / cnt;
        }
    }
    let at = |i: i64, j: i64| -> f64 {
        if i < 0 || i >= ni as i64 || j < 0 || j >= nj as i64 {
            0.0
        } else {
            field[j as usize * ni + i as usize]
        }
    };
    let mut total = 0.0;
    let mut tangential = 0.0;
    for j in 0..nj as i64 {
        for i in 0..ni as i64 {
            let rho = cp.rho(i as usize);
            let ell = at(i, j);
            let d_rho = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h_rho);
            let d_z = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h_z);
            // rho * d/drho (ell / rho) = d ell/drho - ell/rho.
            let radial = d_rho - ell / rho;
            let full = 2.0 * PI * rho;
            let proper = ell > 0.02 * full && ell < 0.98 * full;
            let p = if proper { 2.0 } else { 0.0 };
            total += (p * p + radial * radial + d_z * d_z).sqrt() * h_rho * h_z;
            tangential += p * h_rho * h_z;
        }
    }
    Ok(PerimeterReport {
        total,
        ac_part: total,
        singular_part: 0.0,
        tangential_total: tangential,
        per_shell: Vec::new(),
    })
}
