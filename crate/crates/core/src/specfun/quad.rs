use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SpecFunError;

/// Tolerances for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any one subinterval.
    pub max_depth: u32,
    /// Relative bound on the neglected tail of a semi-infinite integral.
    pub tail_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 60,
            tail_tol: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_depth: u32, tail_tol: f64) -> Result<Self, SpecFunError> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_depth,
            tail_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<(), SpecFunError> {
        let tolerances_ok = [self.rel_tol, self.abs_tol, self.tail_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !tolerances_ok || self.max_depth < 10 {
            return Err(SpecFunError::domain(
                "QuadratureSpec",
                format!("tolerances must be positive and max_depth >= 10: {self:?}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Power-law envelope `|f(x)| ≤ coef · x^{−exponent}` valid from the lower
/// limit onward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    pub coef: f64,
    pub exponent: f64,
}

impl PowerTail {
    /// `∫_x^∞ coef · s^{−p} ds`.
    pub fn bound_beyond(&self, x: f64) -> f64 {
        self.coef * x.powf(1.0 - self.exponent) / (self.exponent - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailedEstimate {
    pub value: f64,
    pub error: f64,
    /// Analytic bound on the part of the integral beyond the truncation point.
    pub tail_bound: f64,
    pub truncated_at: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;
const MAX_TAIL_SEGMENTS: usize = 2_000;

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64), SpecFunError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut finite = fc.is_finite();
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        finite &= pair.is_finite();
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    if !finite {
        return Err(SpecFunError::domain(
            "integrate",
            format!("integrand not finite on [{lo}, {hi}]"),
        ));
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Globally adaptive 15-point Gauss-Kronrod quadrature on `[lo, hi]`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, SpecFunError> {
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(SpecFunError::domain(
            "integrate_finite",
            format!("invalid interval [{lo}, {hi}]"),
        ));
    }
    if lo == hi {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let (value, error) = kronrod15(&f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        lo,
        hi,
        value,
        error,
        depth: 0,
    });
    let mut total = value;
    let mut total_err = error;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        if worst.depth >= spec.max_depth || heap.len() + 2 > MAX_INTERVALS {
            return Err(SpecFunError::Convergence {
                what: "adaptive quadrature",
                estimate: total,
                error: total_err,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = kronrod15(&f, worst.lo, mid)?;
        let (v2, e2) = kronrod15(&f, mid, worst.hi)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        for (lo, hi, value, error) in [(worst.lo, mid, v1, e1), (mid, worst.hi, v2, e2)] {
            heap.push(Piece {
                lo,
                hi,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
    }
    // re-sum to shed drift from the incremental updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

/// Integrates over `[breaks[0], breaks[last]]`, one adaptive run per piece.
/// Breakpoints are sorted and deduplicated first.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate, SpecFunError> {
    let mut points: Vec<f64> = breaks.to_vec();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut acc = Estimate {
        value: 0.0,
        error: 0.0,
    };
    for w in points.windows(2) {
        let part = integrate_finite(&f, w[0], w[1], spec)?;
        acc.value += part.value;
        acc.error += part.error;
    }
    Ok(acc)
}

/// `∫_lo^∞ f`, for an integrand with a known power-law envelope.
///
/// Integrates over geometrically growing segments and stops once the
/// envelope bounds what remains by `tail_tol` relative to the running sum
/// (or to `abs_tol` when the sum is smaller). The returned `tail_bound` is
/// that envelope integral; it is not added to `value`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    tail: PowerTail,
    spec: &QuadratureSpec,
) -> Result<TailedEstimate, SpecFunError> {
    if !lo.is_finite() || !(tail.exponent > 1.0) || !(tail.coef >= 0.0) {
        return Err(SpecFunError::domain(
            "integrate_semi_infinite",
            format!("need finite lower limit and tail exponent > 1: lo={lo}, {tail:?}"),
        ));
    }
    let mut a = lo;
    let mut value = 0.0;
    let mut error = 0.0;
    for _ in 0..MAX_TAIL_SEGMENTS {
        let b = if a > 0.0 { 2.0 * a } else { a + 1.0 };
        let part = integrate_finite(&f, a, b, spec)?;
        value += part.value;
        error += part.error;
        a = b;
        if a > 0.0 {
            let bound = tail.bound_beyond(a);
            if bound <= spec.tail_tol * value.abs().max(spec.abs_tol) {
                return Ok(TailedEstimate {
                    value,
                    error,
                    tail_bound: bound,
                    truncated_at: a,
                });
            }
        }
    }
    Err(SpecFunError::Convergence {
        what: "semi-infinite tail truncation",
        estimate: value,
        error: tail.bound_beyond(a),
    })
}
