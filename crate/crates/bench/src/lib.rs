//! Shared fixtures for the benchmark targets.

use sphsym::direction::DirectionField;
use sphsym::{make_profile, BVSpec, CapFieldSet, Dimension, Profile, RadialGrid, VoxelSet};
use std::f64::consts::PI;

/// Smooth oscillating profile on (1, 3).
pub fn smooth_profile(n: u32, count: usize) -> Profile {
    let grid = RadialGrid::new(1.0, 3.0, count).unwrap();
    let samples = grid
        .nodes()
        .map(|r| (1.2 + 0.5 * (2.0 * r).sin()).clamp(1e-3, PI - 1e-3))
        .collect();
    make_profile(
        Dimension(n),
        grid,
        BVSpec {
            ac_samples: samples,
            ..Default::default()
        },
    )
    .unwrap()
}

/// Cap-field set with a rotating direction field over the smooth profile.
pub fn rotating_set(n: u32, count: usize) -> CapFieldSet {
    CapFieldSet {
        profile: smooth_profile(n, count),
        direction: DirectionField::FourierRandom {
            seed: 7,
            modes: 3,
            amplitude: 0.4,
        },
    }
}

/// Planar disc occupancy grid of the given side length in cells.
pub fn disc_voxel(cells: usize) -> VoxelSet {
    let h = 2.4 / cells as f64;
    VoxelSet::from_indicator(Dimension(2), h, [cells, cells, 1], |x| {
        x[0] * x[0] + x[1] * x[1] < 1.0
    })
    .unwrap()
}
