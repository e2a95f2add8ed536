//! Spherical and circular symmetrisation of sets of finite perimeter.
//!
//! The crate computes the spherical symmetral of a set (every spherical slice
//! replaced by a geodesic cap of the same measure), evaluates perimeters of
//! symmetrals and of cap-field sets via closed-form reductions, classifies
//! rigidity of the symmetrisation inequality, and constructs the standard
//! counterexample families (disconnected profiles, jump profiles, Cantor
//! profiles).

pub mod cantor;
pub mod contour;
pub mod direction;
pub mod equality;
pub mod error;
pub mod io;
pub mod mesh;
pub mod perimeter;
pub mod profile;
pub mod rigidity;
pub mod sets;
pub mod quad;
pub mod sphere;
pub mod symmetrize;

pub use error::{Error, Result};
pub use perimeter::{
    check_inequality, perimeter_capfield, perimeter_symmetral, InequalityReport, PerimeterReport,
    Verdict,
};
pub use profile::{make_profile, BVDecomposition, BVSpec, CantorComponent, Jump, Profile, RadialGrid};
pub use sets::{glue, symmetral_from_profile, CapFieldSet, VoxelSet};
pub use sphere::{
    alpha_from_xi, cap_area, sphere_measure, unit_ball_volume, Dimension, GeodesicCap,
};
