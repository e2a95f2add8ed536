//! Concrete set representations: cap-field sets (every spherical slice is a
//! geodesic cap) and voxel sets (rasterized indicator oracle).

use crate::direction::{DirectionField, RotationBreak};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::sphere::Dimension;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// A spherically v-distributed set whose slice at radius r is the open
/// geodesic cap of half-angle alpha_v(r) centered at r d(r).
#[derive(Debug, Clone)]
pub struct CapFieldSet {
    pub profile: Profile,
    pub direction: DirectionField,
}

/// The spherical symmetral F_v of a profile: the cap-field set with constant
/// direction e1.
pub fn symmetral_from_profile(p: &Profile) -> CapFieldSet {
    CapFieldSet {
        profile: p.clone(),
        direction: DirectionField::Constant { angle: 0.0 },
    }
}

/// Glue `inner` restricted to B(r_bar) with `outer` rotated by the planar
/// angle `gamma` outside B(r_bar). Both sets must share the same profile
/// (they then automatically agree as distributions on both sides of r_bar).
pub fn glue(
    inner: &CapFieldSet,
    outer: &CapFieldSet,
    r_bar: f64,
    gamma: f64,
) -> Result<CapFieldSet> {
    let p = &inner.profile;
    if !(p.grid.r_min < r_bar && r_bar < p.grid.r_max) {
        return Err(Error::invalid(format!(
            "glue radius {r_bar} outside window ({}, {})",
            p.grid.r_min, p.grid.r_max
        )));
    }
    if outer.profile.grid.count != p.grid.count
        || outer.profile.grid.r_min != p.grid.r_min
        || outer.profile.grid.r_max != p.grid.r_max
        || outer.profile.n != p.n
    {
        return Err(Error::invalid("glued sets must share the same profile"));
    }
    // Fast path preserving exact direction structure: both pieces are step
    // rotations of e1.
    let inner_breaks = match &inner.direction {
        DirectionField::Constant { angle } => vec![RotationBreak {
            r: p.grid.r_min,
            angle: *angle,
        }],
        DirectionField::PiecewiseRotation { breaks } => breaks.clone(),
        _ => {
            return Err(Error::invalid(
                "glue supports constant or piecewise-rotation direction fields",
            ))
        }
    };
    let outer_breaks = match &outer.direction {
        DirectionField::Constant { angle } => vec![RotationBreak {
            r: p.grid.r_min,
            angle: *angle,
        }],
        DirectionField::PiecewiseRotation { breaks } => breaks.clone(),
        _ => {
            return Err(Error::invalid(
                "glue supports constant or piecewise-rotation direction fields",
            ))
        }
    };
    let mut breaks: Vec<RotationBreak> = inner_breaks
        .iter()
        .filter(|b| b.r < r_bar)
        .copied()
        .collect();
    let outer_at = |r: f64| {
        outer_breaks
            .iter()
            .rfind(|b| b.r <= r)
            .map_or(0.0, |b| b.angle)
    };
    breaks.push(RotationBreak {
        r: r_bar,
        angle: outer_at(r_bar) + gamma,
    });
    for b in outer_breaks.iter().filter(|b| b.r > r_bar) {
        breaks.push(RotationBreak {
            r: b.r,
            angle: b.angle + gamma,
        });
    }
    Ok(CapFieldSet {
        profile: p.clone(),
        direction: DirectionField::PiecewiseRotation { breaks },
    })
}

impl CapFieldSet {
    pub fn n(&self) -> Dimension {
        self.profile.n
    }

    /// Pointwise membership (open caps; boundary excluded).
    pub fn contains(&self, x: &[f64]) -> bool {
        let r: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r <= self.profile.grid.r_min || r >= self.profile.grid.r_max {
            return false;
        }
        let alpha = self.profile.alpha(r);
        if alpha <= 0.0 {
            return false;
        }
        if alpha >= PI {
            return true;
        }
        let d = self.direction.dir(&self.profile, r);
        let dot: f64 = x.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / r;
        dot.clamp(-1.0, 1.0).acos() < alpha
    }

    /// Rasterize by center-point membership on an origin-centered grid with
    /// spacing h covering the window.
    pub fn rasterize(&self, h: f64) -> Result<VoxelSet> {
        if h <= 0.0 {
            return Err(Error::invalid("voxel spacing must be positive"));
        }
        let extent = self.profile.grid.r_max * 1.02;
        let half = (extent / h).ceil() as usize;
        let side = 2 * half;
        let n = self.n();
        let dims = if n.0 == 2 { [side, side, 1] } else { [side, side, side] };
        let mut v = VoxelSet::empty(n, h, dims)?;
        let coord = |i: usize| (i as f64 + 0.5 - half as f64) * h;
        let plane: Vec<bool> = (0..dims[0] * dims[1] * dims[2])
            .into_par_iter()
            .map(|idx| {
                let k = idx / (dims[0] * dims[1]);
                let rem = idx % (dims[0] * dims[1]);
                let j = rem / dims[0];
                let i = rem % dims[0];
                let x = [coord(i), coord(j), if n.0 == 2 { 0.0 } else { coord(k) }];
                self.contains(&x[..n.0 as usize])
            })
            .collect();
        v.cells = plane;
        Ok(v)
    }
}

/// Origin-centered rasterized indicator set with uniform spacing h.
/// For n = 2, dims[2] = 1 and the z coordinate is ignored.
#[derive(Debug, Clone)]
pub struct VoxelSet {
    pub n: Dimension,
    pub h: f64,
    pub dims: [usize; 3],
    pub cells: Vec<bool>,
}

impl VoxelSet {
    pub fn empty(n: Dimension, h: f64, dims: [usize; 3]) -> Result<Self> {
        if h <= 0.0 {
            return Err(Error::invalid("voxel spacing must be positive"));
        }
        if n.0 == 2 && dims[2] != 1 {
            return Err(Error::invalid("n = 2 voxel sets must have dims[2] = 1"));
        }
        if !(2..=3).contains(&n.0) {
            return Err(Error::invalid("voxel sets support n in {2, 3}"));
        }
        Ok(VoxelSet {
            n,
            h,
            dims,
            cells: vec![false; dims[0] * dims[1] * dims[2]],
        })
    }

    /// Build by evaluating a membership predicate at every cell center.
    pub fn from_indicator<F>(n: Dimension, h: f64, dims: [usize; 3], f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Sync,
    {
        let mut v = VoxelSet::empty(n, h, dims)?;
        let dims = v.dims;
        let nn = n.0 as usize;
        let cells: Vec<bool> = (0..dims[0] * dims[1] * dims[2])
            .into_par_iter()
            .map(|idx| {
                let c = v.center_of(idx);
                f(&c[..nn])
            })
            .collect();
        v.cells = cells;
        Ok(v)
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    /// Center coordinates of the cell with flat index idx.
    pub fn center_of(&self, idx: usize) -> [f64; 3] {
        let k = idx / (self.dims[0] * self.dims[1]);
        let rem = idx % (self.dims[0] * self.dims[1]);
        let j = rem / self.dims[0];
        let i = rem % self.dims[0];
        [
            (i as f64 + 0.5 - self.dims[0] as f64 / 2.0) * self.h,
            (j as f64 + 0.5 - self.dims[1] as f64 / 2.0) * self.h,
            if self.n.0 == 2 {
                0.0
            } else {
                (k as f64 + 0.5 - self.dims[2] as f64 / 2.0) * self.h
            },
        ]
    }

    /// Occupancy at a point by nearest-cell lookup (false outside the grid).
    pub fn contains(&self, x: &[f64]) -> bool {
        let to_idx = |c: f64, dim: usize| -> Option<usize> {
            let t = c / self.h + dim as f64 / 2.0;
            if t < 0.0 || t >= dim as f64 {
                None
            } else {
                Some(t as usize)
            }
        };
        let i = match to_idx(x[0], self.dims[0]) {
            Some(i) => i,
            None => return false,
        };
        let j = match to_idx(x[1], self.dims[1]) {
            Some(j) => j,
            None => return false,
        };
        let k = if self.n.0 == 2 {
            0
        } else {
            match to_idx(x[2], self.dims[2]) {
                Some(k) => k,
                None => return false,
            }
        };
        self.cells[self.index(i, j, k)]
    }

    /// Total volume (cell count times h^n).
    pub fn volume(&self) -> f64 {
        self.cells.iter().filter(|&&c| c).count() as f64 * self.h.powi(self.n.0 as i32)
    }

    /// Largest radius covered by the grid.
    pub fn extent(&self) -> f64 {
        self.dims[..self.n.0 as usize]
            .iter()
            .map(|&d| d as f64 / 2.0 * self.h)
            .fold(f64::INFINITY, f64::min)
    }

    /// Deterministic stratified unit directions for shell sampling: n = 2
    /// jittered uniform angles, n = 3 Fibonacci sphere lattice.
    pub fn shell_directions(&self, m: usize, seed: u64) -> Vec<[f64; 3]> {
        match self.n.0 {
            2 => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m)
                    .map(|j| {
                        let t = 2.0 * PI * (j as f64 + rng.gen_range(0.0..1.0)) / m as f64;
                        [t.cos(), t.sin(), 0.0]
                    })
                    .collect()
            }
            _ => {
                let golden = PI * (3.0 - 5.0f64.sqrt());
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let spin: f64 = rng.gen_range(0.0..2.0 * PI);
                (0..m)
                    .map(|j| {
                        let z = 1.0 - 2.0 * (j as f64 + 0.5) / m as f64;
                        let rho = (1.0 - z * z).max(0.0).sqrt();
                        let phi = golden * j as f64 + spin;
                        [rho * phi.cos(), rho * phi.sin(), z]
                    })
                    .collect()
            }
        }
    }

    /// Measured slice measure v(r) = H^{n-1}(E intersect dB(r)) by stratified
    /// angular sampling with m directions.
    pub fn slice_measure(&self, r: f64, m: usize, seed: u64) -> f64 {
        let dirs = self.shell_directions(m, seed);
        let hits = dirs
            .iter()
            .filter(|d| self.contains(&[d[0] * r, d[1] * r, d[2] * r]))
            .count();
        let total = self.n.sphere_surface() * r.powi(self.n.0 as i32 - 1);
        hits as f64 / m as f64 * total
    }

    /// Estimated average slice direction: normalized mean of occupied
    /// directions; e1 when the slice is empty or the mean degenerates.
    pub fn slice_center(&self, r: f64, m: usize, seed: u64) -> [f64; 3] {
        let dirs = self.shell_directions(m, seed);
        let mut sum = [0.0f64; 3];
        for d in &dirs {
            if self.contains(&[d[0] * r, d[1] * r, d[2] * r]) {
                for (s, c) in sum.iter_mut().zip(d) {
                    *s += c;
                }
            }
        }
        let norm: f64 = sum.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-9 {
            [1.0, 0.0, 0.0]
        } else {
            [sum[0] / norm, sum[1] / norm, sum[2] / norm]
        }
    }

    /// Boundary measure of the slice E intersect dB(r): for n = 2 the number
    /// of occupancy transitions around the circle (H^0 of the slice
    /// boundary); for n = 3 the length of the slice boundary curve on the
    /// sphere via the spherical Crofton formula.
    pub fn slice_boundary_measure(&self, r: f64, m: usize, seed: u64) -> f64 {
        match self.n.0 {
            2 => {
                // Equally spaced angles; count sign changes.
                let sample = |j: usize| {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    self.contains(&[r * t.cos(), r * t.sin(), 0.0])
                };
                let mut transitions = 0usize;
                let mut prev = sample(m - 1);
                for j in 0..m {
                    let cur = sample(j);
                    if cur != prev {
                        transitions += 1;
                    }
                    prev = cur;
                }
                transitions as f64
            }
            _ => {
                // Crofton on the sphere of radius r: two distinct great
                // circles cross exactly twice, so a curve of length L meets a
                // uniformly random great circle E[#] = L / (pi r) times and
                // L = pi r * E[#crossings].
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let circles = 256;
                let steps = m.max(64);
                let mut total_crossings = 0usize;
                for _ in 0..circles {
                    // Random great circle: orthonormal pair (u, w).
                    let u = random_unit(&mut rng);
                    let mut w = random_unit(&mut rng);
                    let dot: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
                    for (wi, ui) in w.iter_mut().zip(&u) {
                        *wi -= dot * ui;
                    }
                    let nrm: f64 = w.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if nrm < 1e-6 {
                        continue;
                    }
                    for wi in w.iter_mut() {
                        *wi /= nrm;
                    }
                    let mut prev = self.contains(&[r * u[0], r * u[1], r * u[2]]);
                    for s in 1..=steps {
                        let t = 2.0 * PI * s as f64 / steps as f64;
                        let x = [
                            r * (t.cos() * u[0] + t.sin() * w[0]),
                            r * (t.cos() * u[1] + t.sin() * w[1]),
                            r * (t.cos() * u[2] + t.sin() * w[2]),
                        ];
                        let cur = self.contains(&x);
                        if cur != prev {
                            total_crossings += 1;
                        }
                        prev = cur;
                    }
                }
                let mean = total_crossings as f64 / circles as f64;
                PI * r * mean
            }
        }
    }

    /// Volume of the symmetric difference with another voxel set on the same
    /// grid layout.
    pub fn symmetric_difference_volume(&self, other: &VoxelSet) -> Result<f64> {
        if self.dims != other.dims || self.h != other.h || self.n != other.n {
            return Err(Error::invalid("voxel grids do not match"));
        }
        let count = self
            .cells
            .iter()
            .zip(&other.cells)
            .filter(|(a, b)| a != b)
            .count();
        Ok(count as f64 * self.h.powi(self.n.0 as i32))
    }

    /// Volume of the symmetric difference with a cap-field set, evaluated at
    /// cell centers.
    pub fn symmetric_difference_capfield(&self, e: &CapFieldSet) -> f64 {
        let nn = self.n.0 as usize;
        let count = (0..self.cells.len())
            .into_par_iter()
            .filter(|&idx| {
                let c = self.center_of(idx);
                self.cells[idx] != e.contains(&c[..nn])
            })
            .count();
        count as f64 * self.h.powi(self.n.0 as i32)
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
