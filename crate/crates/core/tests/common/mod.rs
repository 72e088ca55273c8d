//! Oracles that share no code with the crate's quadrature.
#![allow(dead_code)]

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `∫_a^∞ f` through `x = a/s`, Simpson on `s ∈ [0, 1]`; needs `a > 0` and
/// `f(x) x²` → 0 as `x → ∞`.
pub fn simpson_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, n: usize) -> f64 {
    simpson(
        |s: f64| if s == 0.0 { 0.0 } else { f(a / s) * a / (s * s) },
        0.0,
        1.0,
        n,
    )
}

/// Midpoint rule on `n` cells.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
