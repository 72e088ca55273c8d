use super::SpecFunError;

const TERM_RATIO: f64 = 1e-16;
const MAX_TERMS: usize = 100_000;

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for `c > b > 0`, `z < 1`.
///
/// For `z < 0` the Pfaff transformation
/// `₂F₁(a, b; c; z) = (1 − z)^{−b} ₂F₁(c − a, b; c; z/(z − 1))`
/// moves the series argument into `[0, 1)`; for `0 ≤ z < 1` the power series
/// is summed directly. Arguments outside that family are rejected rather
/// than extrapolated.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    if ![a, b, c, z].iter().all(|v| v.is_finite()) {
        return Err(SpecFunError::domain(
            "hyp2f1",
            format!("non-finite argument ({a}, {b}, {c}, {z})"),
        ));
    }
    if !(c > b && b > 0.0) {
        return Err(SpecFunError::domain(
            "hyp2f1",
            format!("requires c > b > 0, got b={b}, c={c}"),
        ));
    }
    if z >= 1.0 {
        return Err(SpecFunError::domain(
            "hyp2f1",
            format!("requires z < 1, got z={z}"),
        ));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 {
        let w = z / (z - 1.0);
        let prefactor = (1.0 - z).powf(-b);
        return Ok(prefactor * series(c - a, b, c, w)?);
    }
    series(a, b, c, z)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < TERM_RATIO * sum.abs() {
            return Ok(sum);
        }
    }
    Err(SpecFunError::Convergence {
        what: "hypergeometric series",
        estimate: sum,
        error: term.abs(),
    })
}
