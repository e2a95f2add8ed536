//! Quadrature kernels shared by the geometry and perimeter engines.

// Node/weight tables keep the full published digits.
#![allow(clippy::excessive_precision)]

/// 7-point Gauss-Legendre nodes on [-1, 1].
const GL7_X: [f64; 7] = [
    -0.949107912342758524526189684047851,
    -0.741531185599394439863864773280788,
    -0.405845151377397166906606412076961,
    0.0,
    0.405845151377397166906606412076961,
    0.741531185599394439863864773280788,
    0.949107912342758524526189684047851,
];
const GL7_W: [f64; 7] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// 15-point Kronrod extension of GL7 on [-1, 1].
const K15_X: [f64; 15] = [
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
const K15_W: [f64; 15] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];

/// Single Gauss-Kronrod panel; returns (K15 estimate, |K15 - G7| error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = 0.0;
    let mut g = 0.0;
    for i in 0..15 {
        let v = f(c + h * K15_X[i]);
        k += K15_W[i] * v;
        if i % 2 == 1 {
            g += GL7_W[i / 2] * v;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Adaptive Gauss-Kronrod integration of `f` on [a, b] to the given relative
/// tolerance (absolute floor `rel_tol * scale_floor`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _) = gk15(&f, a, b);
    let tol = rel_tol * whole.abs().max(1e-300);
    adapt(&f, a, b, whole, tol, 0)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let (l, le) = gk15(f, a, c);
    let (r, re) = gk15(f, c, b);
    if depth >= 40 || (le + re) <= tol.max(1e-300) || (l + r - whole).abs() <= tol {
        return l + r;
    }
    adapt(f, a, c, l, 0.5 * tol, depth + 1) + adapt(f, c, b, r, 0.5 * tol, depth + 1)
}

/// Fixed 7-point Gauss-Legendre on [a, b]; exactly additive over matching
/// panel splits, used where the perimeter engine needs bitwise additivity.
pub fn gauss7<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..7 {
        s += GL7_W[i] * f(c + h * GL7_X[i]);
    }
    s * h
}
