//! Rigidity classification and counterexample constructions.
//!
//! Rigidity holds for a profile when every perimeter extremal among sets with
//! that slice distribution is a rotation of the symmetral. The classifier
//! tests the two structural conditions: the essential support
//! {0 < alpha < pi} must be an interval, and alpha must be W^{1,1} in its
//! interior (no jumps, no Cantor part). Each failure mode comes with an
//! explicit non-rotational extremal witness.

use crate::direction::{DirectionField, RotationBreak};
use crate::error::{Error, Result};
use crate::profile::{BVSpec, Jump, Profile};
use crate::sets::{glue, symmetral_from_profile, CapFieldSet};
use crate::sphere::{cap_area, cap_intersection_area, geodesic_distance};
use crate::{cantor, make_profile};
use std::f64::consts::PI;

/// Grid-level threshold for "alpha = 0" / "alpha = pi". The structural
/// conditions are exact; this only guards the cap-angle inversion roundoff
/// (inversion tolerance 1e-12, with a 10x margin folded into 1e-9).
pub const EPS0: f64 = 1e-9;

/// Why rigidity fails at a specific location.
#[derive(Debug, Clone, PartialEq)]
pub enum RigidityReason {
    /// The essential support {0 < alpha < pi} is disconnected: alpha hits
    /// the named endpoint at r with mass on both sides.
    IntervalViolation { r: f64, kind: IntervalKind },
    /// alpha jumps at r between the approximate limits.
    Jump {
        r: f64,
        alpha_lower: f64,
        alpha_upper: f64,
    },
    /// alpha carries Cantor mass on the interval.
    Cantor { interval: (f64, f64), mass: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    AlphaZero,
    AlphaPi,
}

#[derive(Debug, Clone)]
pub struct RigidityVerdict {
    pub holds: bool,
    pub reasons: Vec<RigidityReason>,
    /// A non-rotational extremal built from the first failure, when any.
    pub witness: Option<CapFieldSet>,
}

/// Classify rigidity for a profile.
pub fn classify(p: &Profile) -> RigidityVerdict {
    let mut reasons = Vec::new();
    let mut witness: Option<CapFieldSet> = None;
    let grid = &p.grid;

    // Discrete essential support from representative-independent approximate
    // limits at the nodes.
    let in_support: Vec<bool> = (0..grid.count)
        .map(|i| {
            let (lo, hi) = p.approx_limits(grid.node(i));
            lo > EPS0 && hi < PI - EPS0
        })
        .collect();
    let first = in_support.iter().position(|&b| b);
    let last = in_support.iter().rposition(|&b| b);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        // alpha is 0 or pi everywhere: the symmetral is a ball/annulus shell
        // union or empty, trivially rigid.
        _ => {
            return RigidityVerdict {
                holds: true,
                reasons,
                witness,
            }
        }
    };
    for (i, &supported) in in_support.iter().enumerate().take(last + 1).skip(first) {
        if supported {
            continue;
        }
        let r = grid.node(i);
        let (_, hi) = p.approx_limits(r);
        let kind = if hi <= EPS0 {
            IntervalKind::AlphaZero
        } else {
            IntervalKind::AlphaPi
        };
        reasons.push(RigidityReason::IntervalViolation { r, kind });
        if witness.is_none() {
            witness = counterexample_disconnect(p, r, PI / 2.0).ok();
        }
    }

    // W^{1,1} in the interior of the support interval.
    let (int_lo, int_hi) = (grid.node(first), grid.node(last));
    for j in &p.alpha.jumps {
        if j.r > int_lo && j.r < int_hi && j.delta() != 0.0 {
            let (lo, hi) = p.approx_limits(j.r);
            reasons.push(RigidityReason::Jump {
                r: j.r,
                alpha_lower: lo,
                alpha_upper: hi,
            });
            if witness.is_none() {
                // Default rotation: half the allowed bound at lambda = 1/2.
                let gamma = 0.25 * (hi - lo);
                witness = counterexample_jump(p, j.r, 0.5, gamma).ok();
            }
        }
    }
    if let Some(c) = &p.alpha.cantor {
        let mass = c.tv_on(int_lo.max(c.support.0), int_hi.min(c.support.1));
        if mass > 0.0 {
            reasons.push(RigidityReason::Cantor {
                interval: c.support,
                mass,
            });
            if witness.is_none() {
                witness = counterexample_cantor(p, 0.5).ok();
            }
        }
    }

    RigidityVerdict {
        holds: reasons.is_empty(),
        reasons,
        witness,
    }
}

/// Whether any node on the given side of r_bar carries alpha strictly inside
/// (0, pi).
fn has_mass(p: &Profile, r_bar: f64, right: bool) -> bool {
    p.grid.nodes().any(|r| {
        if (r > r_bar) != right || r == r_bar {
            return false;
        }
        let (lo, hi) = p.approx_limits(r);
        lo > EPS0 && hi < PI - EPS0
    })
}

/// Disconnected-support counterexample: alpha vanishes (or fills the sphere)
/// at r_bar, so the outer component can be rotated by any planar angle gamma
/// without creating new boundary. The result has the same perimeter as the
/// symmetral.
pub fn counterexample_disconnect(p: &Profile, r_bar: f64, gamma: f64) -> Result<CapFieldSet> {
    let (lo, hi) = p.approx_limits(r_bar);
    if !(hi <= EPS0 || lo >= PI - EPS0) {
        return Err(Error::invalid(format!(
            "alpha at r = {r_bar} is strictly inside (0, pi); not a separating point"
        )));
    }
    if !(has_mass(p, r_bar, false) && has_mass(p, r_bar, true)) {
        return Err(Error::invalid(
            "separating point needs nontrivial mass on both sides",
        ));
    }
    let fv = symmetral_from_profile(p);
    glue(&fv, &fv, r_bar, gamma)
}

fn jump_at(p: &Profile, r_bar: f64) -> Option<&Jump> {
    p.alpha
        .jumps
        .iter()
        .find(|j| (j.r - r_bar).abs() <= 1e-12 * r_bar.max(1.0))
}

/// Jump counterexample: alpha jumps at r_bar, and the smaller cap rotated by
/// gamma < lambda * (alpha_upper - alpha_lower), lambda < 1, stays nested in
/// the larger cap, so the boundary sphere contribution at r_bar is unchanged
/// and the glued set is extremal.
pub fn counterexample_jump(p: &Profile, r_bar: f64, lambda: f64, gamma: f64) -> Result<CapFieldSet> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::invalid("lambda must lie in (0, 1)"));
    }
    let j = jump_at(p, r_bar)
        .ok_or_else(|| Error::invalid(format!("alpha has no jump at r = {r_bar}")))?;
    let width = j.delta().abs();
    if !(gamma > 0.0 && gamma < lambda * width) {
        return Err(Error::invalid(format!(
            "rotation {gamma} violates the nesting bound lambda * jump = {}",
            lambda * width
        )));
    }
    probe_jump(p, r_bar, gamma)
}

/// Unrestricted variant of the jump construction: glue a planar rotation by
/// any gamma at r_bar for studying when the perimeter equality breaks.
pub fn probe_jump(p: &Profile, r_bar: f64, gamma: f64) -> Result<CapFieldSet> {
    let fv = symmetral_from_profile(p);
    glue(&fv, &fv, r_bar, gamma)
}

/// Cantor-flow counterexample: the cap axis rotates with angle
/// beta(r) = lambda * (alpha(r) - alpha(a)) across the Cantor support [a, b].
/// The flow inherits the purely-Cantor variation of alpha, producing an
/// extremal that is not W^{1,1}-equivalent to any rotation of the symmetral.
pub fn counterexample_cantor(p: &Profile, lambda: f64) -> Result<CapFieldSet> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::invalid("lambda must lie in (0, 1)"));
    }
    let c = p
        .alpha
        .cantor
        .filter(|c| c.scale != 0.0)
        .ok_or_else(|| Error::invalid("profile carries no Cantor mass"))?;
    Ok(CapFieldSet {
        profile: p.clone(),
        direction: DirectionField::CantorFlow {
            lambda,
            support: c.support,
        },
    })
}

/// Depth-k step approximant of a Cantor profile and its rotated extremal.
///
/// The staircase is replaced by jumps of half the level-k rise at both
/// endpoints of every level-k ternary interval (2^{k+1} jumps in total,
/// matching the staircase on every level-k plateau), and the direction field
/// rotates by lambda times each jump at the same radii. Every individual jump
/// satisfies the nesting bound, so the approximant pair has exactly equal
/// perimeters.
pub fn step_approximant(p: &Profile, k: u32, lambda: f64) -> Result<(Profile, CapFieldSet)> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::invalid("lambda must lie in (0, 1)"));
    }
    let c = p
        .alpha
        .cantor
        .filter(|c| c.scale != 0.0)
        .ok_or_else(|| Error::invalid("profile carries no Cantor mass"))?;
    let (a, b) = c.support;
    let width = b - a;
    let half_rise = c.scale / 2.0f64.powi(k as i32 + 1);
    let w3 = 3.0f64.powi(-(k as i32));
    // Jump radii in increasing order: both endpoints of each interval.
    let mut radii = Vec::with_capacity(1 << (k + 1));
    for l in cantor::level_intervals(k) {
        radii.push(a + width * l);
        radii.push(a + width * (l + w3));
    }
    // Merge with the existing jumps (sorted), then reconstruct left values
    // for the left-continuous representative.
    let mut events: Vec<(f64, f64)> = radii.iter().map(|&r| (r, half_rise)).collect();
    events.extend(p.alpha.jumps.iter().map(|j| (j.r, j.delta())));
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut cumulative = 0.0;
    let mut jumps = Vec::with_capacity(events.len());
    for (r, delta) in events {
        let left = p.alpha.ac_at(r) + cumulative;
        cumulative += delta;
        jumps.push(Jump {
            r,
            left,
            right: left + delta,
        });
    }
    let approx = make_profile(
        p.n,
        p.grid,
        BVSpec {
            ac_samples: p.alpha.ac_samples.clone(),
            jumps,
            cantor: None,
        },
    )?;
    // Rotation accumulates lambda times the staircase rise only; existing
    // profile jumps do not move the axis.
    let mut angle = 0.0;
    let breaks = radii
        .iter()
        .map(|&r| {
            angle += lambda * half_rise;
            RotationBreak { r, angle }
        })
        .collect();
    let e = CapFieldSet {
        profile: approx.clone(),
        direction: DirectionField::PiecewiseRotation { breaks },
    };
    Ok((approx, e))
}

/// Volume of the symmetric difference between a cap-field set and the planar
/// rotation of its symmetral by gamma, integrated shell by shell with the
/// midpoint rule on `samples` panels.
pub fn symmetric_difference_to_rotation(e: &CapFieldSet, gamma: f64, samples: usize) -> f64 {
    let p = &e.profile;
    let n = p.n;
    let axis = [gamma.cos(), gamma.sin(), 0.0];
    let h = (p.grid.r_max - p.grid.r_min) / samples as f64;
    let mut total = 0.0;
    for i in 0..samples {
        let r = p.grid.r_min + (i as f64 + 0.5) * h;
        let alpha = p.alpha(r);
        if alpha <= 0.0 {
            continue;
        }
        let d = e.direction.dir(p, r);
        let delta = geodesic_distance(&d, &axis[..n.0 as usize]).unwrap_or(0.0);
        let Ok(cap) = cap_area(n, r, alpha) else {
            continue;
        };
        let overlap = cap_intersection_area(n, r, alpha, alpha, delta).unwrap_or(cap);
        total += 2.0 * (cap - overlap) * h;
    }
    total
}

/// Minimum symmetric-difference volume between the set and every planar
/// rotation of its symmetral, scanned over `angles` rotation angles. Returns
/// (best angle, volume).
pub fn rotation_gap(e: &CapFieldSet, angles: usize, samples: usize) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    for i in 0..angles {
        let gamma = -PI + 2.0 * PI * i as f64 / angles as f64;
        let sd = symmetric_difference_to_rotation(e, gamma, samples);
        if sd < best.1 {
            best = (gamma, sd);
        }
    }
    best
}

/// Positive lower bound for the symmetric-difference volume between the set
/// and every rotation of its symmetral, valid whenever the axis angle spreads
/// over a nontrivial range.
///
/// With Delta the spread of the planar axis angle over the shells, any single
/// rotation angle is at least Delta/2 away from one of the extremes, hence at
/// least Delta/4 away from every shell whose axis angle lies within Delta/4
/// of that extreme. The bound is the smaller of the two extreme clusters'
/// mismatch volumes at axis distance Delta/4 (mismatch grows with distance,
/// so this underestimates). Returns 0 when the axis is essentially constant.
pub fn rotation_separation_bound(e: &CapFieldSet, samples: usize) -> f64 {
    let p = &e.profile;
    let n = p.n;
    let h = (p.grid.r_max - p.grid.r_min) / samples as f64;
    let shells: Vec<(f64, f64, f64)> = (0..samples)
        .filter_map(|i| {
            let r = p.grid.r_min + (i as f64 + 0.5) * h;
            let alpha = p.alpha(r);
            if alpha <= EPS0 || alpha >= PI - EPS0 {
                return None;
            }
            Some((r, alpha, e.direction.planar_angle(p, r)))
        })
        .collect();
    let (lo, hi) = shells.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, s| {
        (acc.0.min(s.2), acc.1.max(s.2))
    });
    let spread = hi - lo;
    let positive = spread > 0.0;
    if !positive {
        return 0.0;
    }
    let quarter = spread / 4.0;
    let mut mass = [0.0f64; 2];
    for (r, alpha, theta) in shells {
        let near_lo = theta <= lo + quarter;
        let near_hi = theta >= hi - quarter;
        if !(near_lo || near_hi) {
            continue;
        }
        let Ok(cap) = cap_area(n, r, alpha) else {
            continue;
        };
        let overlap = cap_intersection_area(n, r, alpha, alpha, quarter).unwrap_or(cap);
        let mismatch = 2.0 * (cap - overlap) * h;
        if near_lo {
            mass[0] += mismatch;
        }
        if near_hi {
            mass[1] += mismatch;
        }
    }
    mass[0].min(mass[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perimeter::{self, eps_budget};
    use crate::profile::{CantorComponent, RadialGrid};
    use crate::sphere::Dimension;
    use approx::assert_relative_eq;

    const FULL: (f64, f64) = (0.0, f64::INFINITY);

    fn smooth_profile() -> Profile {
        let grid = RadialGrid::new(1.0, 3.0, 65).unwrap();
        make_profile(
            Dimension(2),
            grid,
            BVSpec {
                ac_samples: grid.nodes().map(|r| 1.0 + 0.4 * (r - 2.0).sin()).collect(),
                ..Default::default()
            },
        )
        .unwrap()
    }

    fn gapped_profile() -> Profile {
        // alpha = pi/3 on (1, 1.8), 0 on [1.8, 2.2], pi/3 on (2.2, 3).
        let grid = RadialGrid::new(1.0, 3.0, 101).unwrap();
        make_profile(
            Dimension(2),
            grid,
            BVSpec {
                ac_samples: vec![0.0; 101],
                jumps: vec![
                    Jump { r: 1.2, left: 0.0, right: PI / 3.0 },
                    Jump { r: 1.8, left: PI / 3.0, right: 0.0 },
                    Jump { r: 2.2, left: 0.0, right: PI / 3.0 },
                    Jump { r: 2.8, left: PI / 3.0, right: 0.0 },
                ],
                cantor: None,
            },
        )
        .unwrap()
    }

    fn jump_profile() -> Profile {
        // Constant pi/3 inner, pi/6 outer, jump at r = 2 on window (1, 3).
        let grid = RadialGrid::new(1.0, 3.0, 65).unwrap();
        make_profile(
            Dimension(2),
            grid,
            BVSpec {
                ac_samples: vec![PI / 3.0; 65],
                jumps: vec![Jump { r: 2.0, left: PI / 3.0, right: PI / 6.0 }],
                cantor: None,
            },
        )
        .unwrap()
    }

    fn cantor_profile() -> Profile {
        let grid = RadialGrid::new(1.0, 3.0, 65).unwrap();
        make_profile(
            Dimension(2),
            grid,
            BVSpec {
                ac_samples: vec![PI / 4.0; 65],
                jumps: vec![],
                cantor: Some(CantorComponent::new(13, (1.5, 2.5), PI / 4.0).unwrap()),
            },
        )
        .unwrap()
    }

    #[test]
    fn smooth_profile_holds() {
        let v = classify(&smooth_profile());
        assert!(v.holds);
        assert!(v.reasons.is_empty());
        assert!(v.witness.is_none());
    }

    #[test]
    fn gap_fails_with_interval_violation() {
        let v = classify(&gapped_profile());
        assert!(!v.holds);
        assert!(v.reasons.iter().any(|r| matches!(
            r,
            RigidityReason::IntervalViolation { kind: IntervalKind::AlphaZero, r }
                if (1.8..=2.2).contains(r)
        )));
        let w = v.witness.expect("witness");
        let p = &w.profile;
        let p_e = perimeter::perimeter_capfield(&w, FULL, 0).unwrap().total;
        let p_fv = perimeter::perimeter_symmetral(p, FULL).total;
        assert_relative_eq!(p_e, p_fv, epsilon = 1e-9);
        let (_, gap) = rotation_gap(&w, 360, 512);
        assert!(gap > 0.05, "rotation gap {gap}");
    }

    #[test]
    fn jump_fails_and_witness_is_extremal() {
        let p = jump_profile();
        let v = classify(&p);
        assert!(!v.holds);
        assert!(v
            .reasons
            .iter()
            .any(|r| matches!(r, RigidityReason::Jump { r, .. } if (*r - 2.0).abs() < 1e-12)));
        let w = v.witness.expect("witness");
        let p_e = perimeter::perimeter_capfield(&w, FULL, 0).unwrap().total;
        let p_fv = perimeter::perimeter_symmetral(&p, FULL).total;
        assert_relative_eq!(p_e, p_fv, epsilon = 1e-9);
        let (_, gap) = rotation_gap(&w, 360, 512);
        assert!(gap > 1e-3, "rotation gap {gap}");
    }

    #[test]
    fn jump_witness_matches_closed_form() {
        // P(F_v) on window (1, 3): boundary jumps 2r|xi jump| at 1 and 3,
        // interior jump at 2, plus the two flat arcs' radial boundaries.
        let p = jump_profile();
        let p_fv = perimeter::perimeter_symmetral(&p, FULL).total;
        let exact = 7.0 * PI / 3.0 + 4.0;
        assert_relative_eq!(p_fv, exact, epsilon = 1e-9);
        let e = counterexample_jump(&p, 2.0, 0.5, PI / 12.0 * 0.99).unwrap();
        let p_e = perimeter::perimeter_capfield(&e, FULL, 0).unwrap().total;
        assert_relative_eq!(p_e, exact, epsilon = 1e-9);
    }

    #[test]
    fn probe_beyond_bound_creates_slack() {
        let p = jump_profile();
        let e = probe_jump(&p, 2.0, PI / 4.0).unwrap();
        let p_e = perimeter::perimeter_capfield(&e, FULL, 0).unwrap().total;
        let p_fv = perimeter::perimeter_symmetral(&p, FULL).total;
        // n = 2 arc arithmetic: excess 2 r (gamma - jump width).
        let excess = 2.0 * 2.0 * (PI / 4.0 - PI / 6.0);
        assert_relative_eq!(p_e - p_fv, excess, epsilon = 1e-9);
        assert!(p_e - p_fv > 0.05);
    }

    #[test]
    fn jump_bound_enforced_and_probe_open() {
        let p = jump_profile();
        assert!(counterexample_jump(&p, 2.0, 0.5, PI / 6.0).is_err());
        assert!(counterexample_jump(&p, 2.5, 0.5, 0.01).is_err());
        assert!(probe_jump(&p, 2.0, PI / 2.0).is_ok());
    }

    #[test]
    fn cantor_fails_and_flow_is_extremal() {
        let p = cantor_profile();
        let v = classify(&p);
        assert!(!v.holds);
        assert!(v
            .reasons
            .iter()
            .any(|r| matches!(r, RigidityReason::Cantor { mass, .. } if (*mass - PI / 4.0).abs() < 1e-9)));
        let w = v.witness.expect("witness");
        let p_e = perimeter::perimeter_capfield(&w, FULL, 0).unwrap().total;
        let p_fv = perimeter::perimeter_symmetral(&p, FULL).total;
        assert_relative_eq!(p_e, p_fv, epsilon = 1e-9);
        let (_, gap) = rotation_gap(&w, 360, 1024);
        assert!(gap > 1e-3, "rotation gap {gap}");
    }

    #[test]
    fn step_approximants_converge() {
        let p = cantor_profile();
        let p_fv = perimeter::perimeter_symmetral(&p, FULL).total;
        let mut last_err = f64::INFINITY;
        for k in [2u32, 4, 6, 8] {
            let (pk, ek) = step_approximant(&p, k, 0.5).unwrap();
            let p_fvk = perimeter::perimeter_symmetral(&pk, FULL).total;
            let p_ek = perimeter::perimeter_capfield(&ek, FULL, 0).unwrap().total;
            assert_relative_eq!(p_ek, p_fvk, epsilon = 1e-9);
            let err = (p_fvk - p_fv).abs();
            assert!(err < last_err, "k = {k}: {err} !< {last_err}");
            last_err = err;
        }
        assert!(last_err / p_fv <= 1e-3, "relative error {}", last_err / p_fv);
    }

    #[test]
    fn separation_bound_below_gap() {
        let p = jump_profile();
        let w = counterexample_jump(&p, 2.0, 0.5, PI / 13.0).unwrap();
        let bound = rotation_separation_bound(&w, 512);
        assert!(bound > 0.0);
        let (_, gap) = rotation_gap(&w, 720, 512);
        assert!(gap >= bound * 0.99, "gap {gap} vs bound {bound}");

        let c = cantor_profile();
        let w = counterexample_cantor(&c, 0.5).unwrap();
        let bound = rotation_separation_bound(&w, 1024);
        assert!(bound > 0.0);
        let (_, gap) = rotation_gap(&w, 720, 1024);
        assert!(gap >= bound * 0.99, "gap {gap} vs bound {bound}");
    }

    #[test]
    fn holds_soundness_random_fields() {
        // When rigidity holds, seeded smooth direction fields are either
        // essentially constant or strictly non-extremal.
        let p = smooth_profile();
        assert!(classify(&p).holds);
        let p_fv = perimeter::perimeter_symmetral(&p, FULL).total;
        for seed in 0..30u64 {
            let e = CapFieldSet {
                profile: p.clone(),
                direction: DirectionField::FourierRandom {
                    seed,
                    modes: 4,
                    amplitude: 0.3,
                },
            };
            let p_e = perimeter::perimeter_capfield(&e, FULL, 0).unwrap().total;
            let budget = p_fv * eps_budget::CAPFIELD_2D_REL;
            let oscillation = (0..512)
                .map(|i| {
                    let r = p.grid.r_min
                        + (p.grid.r_max - p.grid.r_min) * i as f64 / 511.0;
                    (e.direction.planar_angle(&p, r)
                        - e.direction.planar_angle(&p, p.grid.r_min + 1e-12))
                    .abs()
                })
                .fold(0.0f64, f64::max);
            assert!(
                p_e > p_fv + budget || oscillation <= 1e-6,
                "seed {seed}: perimeter {p_e} vs {p_fv}, oscillation {oscillation}"
            );
        }
    }
}
