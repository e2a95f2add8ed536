//! Direction fields r -> d(r) on the sphere: the cap-center axis of a
//! cap-field set as a function of the radius.

use crate::profile::Profile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A piecewise-rotation breakpoint: the planar rotation angle applied to e1
/// for radii beyond `r`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RotationBreak {
    pub r: f64,
    pub angle: f64,
}

/// Direction field d(r) in S^{n-1}. All kinds except `fourier_random` in
/// n = 3 rotate e1 inside the (x1, x2) plane by a radius-dependent angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectionField {
    /// d(r) = R_angle e1 for all r; angle 0 is the symmetral's axis e1.
    Constant {
        #[serde(default)]
        angle: f64,
    },
    /// Left-continuous step rotations: angle of the last break with
    /// break.r < r (0 before the first break).
    PiecewiseRotation { breaks: Vec<RotationBreak> },
    /// Cantor flow: angle lambda * (alpha_v(r) - alpha_v(a)) on the support
    /// [a, b], zero before, frozen after. Inherits the full BV structure of
    /// the profile's alpha on the support, Cantor part included.
    CantorFlow { lambda: f64, support: (f64, f64) },
    /// Smooth seeded field: angle(r) = sum a_k sin(k pi (r - r_min) / W).
    /// In n = 3 a second independent angle process tilts out of the plane.
    FourierRandom {
        seed: u64,
        modes: usize,
        amplitude: f64,
    },
}

fn fourier_coeffs(seed: u64, modes: usize, amplitude: f64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (stream.wrapping_mul(0x9E3779B97F4A7C15)));
    (1..=modes)
        .map(|k| amplitude * rng.gen_range(-1.0..1.0) / k as f64)
        .collect()
}

fn fourier_angle(coeffs: &[f64], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a * ((i + 1) as f64 * std::f64::consts::PI * t).sin())
        .sum()
}

fn fourier_angle_slope(coeffs: &[f64], t: f64, width: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let k = (i + 1) as f64 * std::f64::consts::PI;
            a * k * (k * t).cos()
        })
        .sum::<f64>()
        / width
}

impl DirectionField {
    /// The planar rotation angle theta_c(r) (left-continuous representative).
    /// For `fourier_random` this is the first of the two angle processes.
    pub fn planar_angle(&self, p: &Profile, r: f64) -> f64 {
        match self {
            DirectionField::Constant { angle } => *angle,
            DirectionField::PiecewiseRotation { breaks } => breaks
                .iter()
                .rfind(|b| b.r < r)
                .map_or(0.0, |b| b.angle),
            DirectionField::CantorFlow { lambda, support } => {
                let (a, b) = *support;
                let rc = r.clamp(a, b);
                lambda * (p.alpha(rc) - p.alpha(a))
            }
            DirectionField::FourierRandom {
                seed,
                modes,
                amplitude,
            } => {
                let coeffs = fourier_coeffs(*seed, *modes, *amplitude, 1);
                let w = p.grid.r_max - p.grid.r_min;
                fourier_angle(&coeffs, (r - p.grid.r_min) / w)
            }
        }
    }

    /// Right limit of the planar angle at r.
    pub fn planar_angle_right(&self, p: &Profile, r: f64) -> f64 {
        match self {
            DirectionField::PiecewiseRotation { breaks } => breaks
                .iter()
                .rfind(|b| b.r <= r)
                .map_or(0.0, |b| b.angle),
            _ => self.planar_angle(p, r),
        }
    }

    /// AC derivative of the planar angle at r (jumps and Cantor parts
    /// excluded).
    pub fn planar_angle_slope(&self, p: &Profile, r: f64) -> f64 {
        match self {
            DirectionField::Constant { .. } | DirectionField::PiecewiseRotation { .. } => 0.0,
            DirectionField::CantorFlow { lambda, support } => {
                if (support.0..support.1).contains(&r) {
                    lambda * p.alpha_ac_slope(r)
                } else {
                    0.0
                }
            }
            DirectionField::FourierRandom {
                seed,
                modes,
                amplitude,
            } => {
                let coeffs = fourier_coeffs(*seed, *modes, *amplitude, 1);
                let w = p.grid.r_max - p.grid.r_min;
                fourier_angle_slope(&coeffs, (r - p.grid.r_min) / w, w)
            }
        }
    }

    /// Coefficient of the profile's Cantor staircase inside theta_c: the
    /// Cantor part of theta_c is coeff * D^c alpha_v.
    pub fn cantor_coefficient(&self) -> f64 {
        match self {
            DirectionField::CantorFlow { lambda, .. } => *lambda,
            _ => 0.0,
        }
    }

    /// Radii where the direction rotates discontinuously, with the angle jump.
    pub fn jump_radii(&self) -> Vec<(f64, f64)> {
        match self {
            DirectionField::PiecewiseRotation { breaks } => {
                let mut out = Vec::new();
                let mut prev = 0.0;
                for b in breaks {
                    if b.angle != prev {
                        out.push((b.r, b.angle - prev));
                    }
                    prev = b.angle;
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Out-of-plane tilt angle (n = 3 fourier fields only; 0 otherwise).
    pub fn tilt_angle(&self, p: &Profile, r: f64) -> f64 {
        match self {
            DirectionField::FourierRandom {
                seed,
                modes,
                amplitude,
            } => {
                let coeffs = fourier_coeffs(*seed, *modes, *amplitude, 2);
                let w = p.grid.r_max - p.grid.r_min;
                fourier_angle(&coeffs, (r - p.grid.r_min) / w)
            }
            _ => 0.0,
        }
    }

    /// Unit direction vector d(r) in R^n.
    pub fn dir(&self, p: &Profile, r: f64) -> Vec<f64> {
        let theta = self.planar_angle(p, r);
        let n = p.n.0 as usize;
        let mut d = vec![0.0; n];
        if n == 3 {
            let phi = self.tilt_angle(p, r);
            d[0] = theta.cos() * phi.cos();
            d[1] = theta.sin() * phi.cos();
            d[2] = phi.sin();
        } else {
            d[0] = theta.cos();
            d[1] = theta.sin();
        }
        d
    }

    /// Whether the field is smooth in r (no declared jumps, no Cantor part).
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            DirectionField::Constant { .. } | DirectionField::FourierRandom { .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{make_profile, BVSpec, CantorComponent, RadialGrid};
    use crate::sphere::Dimension;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn test_profile() -> Profile {
        let grid = RadialGrid::new(1.0, 3.0, 41).unwrap();
        make_profile(
            Dimension(2),
            grid,
            BVSpec {
                ac_samples: vec![PI / 3.0; 41],
                jumps: vec![],
                cantor: Some(CantorComponent::new(6, (1.5, 2.5), PI / 4.0).unwrap()),
            },
        )
        .unwrap()
    }

    #[test]
    fn unit_norm_everywhere() {
        let p = test_profile();
        let fields = [
            DirectionField::Constant { angle: 0.7 },
            DirectionField::PiecewiseRotation {
                breaks: vec![RotationBreak { r: 2.0, angle: 0.4 }],
            },
            DirectionField::CantorFlow {
                lambda: 0.5,
                support: (1.5, 2.5),
            },
            DirectionField::FourierRandom {
                seed: 42,
                modes: 5,
                amplitude: 0.3,
            },
        ];
        for f in &fields {
            for i in 0..=100 {
                let r = 1.0 + 2.0 * i as f64 / 100.0;
                let d = f.dir(&p, r);
                let norm: f64 = d.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn piecewise_rotation_left_continuous() {
        let p = test_profile();
        let f = DirectionField::PiecewiseRotation {
            breaks: vec![RotationBreak { r: 2.0, angle: 0.4 }],
        };
        assert_eq!(f.planar_angle(&p, 2.0), 0.0);
        assert_eq!(f.planar_angle_right(&p, 2.0), 0.4);
        assert_eq!(f.planar_angle(&p, 2.0 + 1e-12), 0.4);
        assert_eq!(f.jump_radii(), vec![(2.0, 0.4)]);
    }

    #[test]
    fn cantor_flow_tracks_alpha() {
        let p = test_profile();
        let f = DirectionField::CantorFlow {
            lambda: 0.5,
            support: (1.5, 2.5),
        };
        assert_eq!(f.planar_angle(&p, 1.2), 0.0);
        // Frozen after the support at lambda * total rise.
        assert_relative_eq!(f.planar_angle(&p, 2.9), 0.5 * PI / 4.0, max_relative = 1e-9);
        // Halfway in alpha at the support midpoint (staircase value 1/2).
        assert_relative_eq!(
            f.planar_angle(&p, 2.0),
            0.5 * (PI / 4.0) * 0.5,
            max_relative = 1e-9
        );
        assert_eq!(f.cantor_coefficient(), 0.5);
    }

    #[test]
    fn fourier_deterministic_and_smooth() {
        let p = test_profile();
        let f = DirectionField::FourierRandom {
            seed: 7,
            modes: 6,
            amplitude: 0.2,
        };
        let g = DirectionField::FourierRandom {
            seed: 7,
            modes: 6,
            amplitude: 0.2,
        };
        assert_eq!(f.planar_angle(&p, 1.7), g.planar_angle(&p, 1.7));
        // Vanishes at the window endpoints by construction.
        assert!(f.planar_angle(&p, 1.0).abs() < 1e-12);
        assert!(f.planar_angle(&p, 3.0).abs() < 1e-9);
        // Slope matches finite differences.
        for &r in &[1.3, 2.1, 2.8] {
            let h = 1e-6;
            let fd = (f.planar_angle(&p, r + h) - f.planar_angle(&p, r - h)) / (2.0 * h);
            assert!((fd - f.planar_angle_slope(&p, r)).abs() < 1e-6);
        }
    }
}
