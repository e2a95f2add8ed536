//! Cantor staircase utilities: the devil's staircase, its right inverse, the
//! singular measure it differentiates to, and the level-k ternary partitions
//! used by step approximants.

/// Digits carried by the digit-expansion routines. 3^-40 ~ 8e-20, well below
/// f64 resolution on [0, 1].
const DIGITS: u32 = 40;

/// The Cantor function c: [0, 1] -> [0, 1] (devil's staircase). Inputs
/// outside [0, 1] are clamped.
pub fn cantor_value(x: f64) -> f64 {
    let mut x = x.clamp(0.0, 1.0);
    let mut value = 0.0;
    let mut bit = 0.5;
    for _ in 0..DIGITS {
        x *= 3.0;
        let digit = x.floor().min(2.0);
        x -= digit;
        if digit == 1.0 {
            // Inside a removed middle third: the staircase is flat.
            return value + bit;
        }
        if digit == 2.0 {
            value += bit;
        }
        bit *= 0.5;
    }
    value
}

/// Right inverse of the Cantor function: maps t with binary digits b_j to the
/// Cantor-set point with ternary digits 2 b_j. Satisfies c(inverse(t)) = t and
/// pushes Lebesgue measure on [0, 1] forward to the Cantor measure.
pub fn cantor_inverse(t: f64) -> f64 {
    let mut t = t.clamp(0.0, 1.0);
    let mut x = 0.0;
    let mut tri = 1.0 / 3.0;
    for _ in 0..DIGITS {
        t *= 2.0;
        if t >= 1.0 {
            x += 2.0 * tri;
            t -= 1.0;
        }
        tri /= 3.0;
    }
    x
}

/// Integral of g against the Cantor measure on [0, 1], computed through the
/// pushforward identity int g dmu_c = int_0^1 g(c^{-1}(t)) dt with 2^depth
/// dyadic panels and 2-point Gauss per panel. The integrand is smooth on each
/// dyadic panel once depth exceeds the target resolution, so the error decays
/// like 9^{-depth} for Lipschitz g.
pub fn cantor_integral<F: Fn(f64) -> f64>(g: F, depth: u32) -> f64 {
    cantor_quad_points(depth).map(|(x, w)| w * g(x)).sum()
}

/// Quadrature nodes and weights for the Cantor measure on [0, 1] (see
/// `cantor_integral`); weights sum to 1, nodes lie in the Cantor set.
pub fn cantor_quad_points(depth: u32) -> impl Iterator<Item = (f64, f64)> {
    let panels = 1u64 << depth;
    let h = 1.0 / panels as f64;
    // 2-point Gauss nodes at c +- h/(2 sqrt 3).
    let off = 0.5 * h / 3.0f64.sqrt();
    (0..panels).flat_map(move |i| {
        let c = (i as f64 + 0.5) * h;
        [
            (cantor_inverse(c - off), 0.5 * h),
            (cantor_inverse(c + off), 0.5 * h),
        ]
    })
}

/// Left endpoints of the 2^k level-k ternary intervals covering the Cantor
/// set, in increasing order. Interval i runs from the returned endpoint to
/// endpoint + 3^{-k}; the Cantor function maps it onto [i/2^k, (i+1)/2^k].
pub fn level_intervals(k: u32) -> Vec<f64> {
    let count = 1u64 << k;
    let mut out = Vec::with_capacity(count as usize);
    for i in 0..count {
        let mut x = 0.0;
        let mut tri = 1.0 / 3.0;
        for j in (0..k).rev() {
            if (i >> j) & 1 == 1 {
                x += 2.0 * tri;
            }
            tri /= 3.0;
        }
        out.push(x);
    }
    out
}
