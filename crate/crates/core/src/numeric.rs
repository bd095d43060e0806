//! Scalar helpers shared by the state constructors: binomial weights and
//! angle normalization.

use std::f64::consts::TAU;

/// Binomial coefficient as an `f64`, evaluated by the multiplicative formula.
///
/// Exact while the result stays below 2^53; beyond that the relative error
/// is a few ulps per factor. Returns `+inf` once the value overflows
/// (n > 1029 for the central coefficient).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        // (n - i) / (i + 1) keeps every partial product an integer
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Natural log of the binomial coefficient; never overflows.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// `C(n, k) p^k (1-p)^(n-k)` with `0^0 = 1`, so the endpoints `p = 0` and
/// `p = 1` reproduce the vacuum and number-state limits exactly.
pub fn binomial_weight(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let q = 1.0 - p;
    let c = binomial(n, k);
    if c.is_finite() {
        let w = c * p.powi(k as i32) * q.powi((n - k) as i32);
        if w.is_finite() && (w > 0.0 || p == 0.0 || q == 0.0) {
            return w;
        }
    }
    log_space_weight(ln_binomial(n, k), k, n - k, p, q)
}

/// Product `sqrt(C(n1,k) C(n2,k)) p^k (1-p)^m` used by the squeezing sums.
pub fn paired_binomial_term(n1: usize, n2: usize, k: usize, m: usize, p: f64) -> f64 {
    let q = 1.0 - p;
    let c = (binomial(n1, k) * binomial(n2, k)).sqrt();
    if c.is_finite() {
        let w = c * p.powi(k as i32) * q.powi(m as i32);
        if w.is_finite() && (w > 0.0 || p == 0.0 || q == 0.0) {
            return w;
        }
    }
    let ln_c = 0.5 * (ln_binomial(n1, k) + ln_binomial(n2, k));
    log_space_weight(ln_c, k, m, p, q)
}

fn log_space_weight(ln_c: f64, k: usize, m: usize, p: f64, q: f64) -> f64 {
    let lp = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    let lq = if m == 0 { 0.0 } else { m as f64 * q.ln() };
    (ln_c + lp + lq).exp()
}

/// Reduces an angle to `[0, 2pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

/// `n` evenly spaced points on `[a, b]`, both endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
                .collect()
        }
    }
}
