//! Quadrature of the pair-term integrals.
//!
//! Everything here is expressed in units of the cell radius: positions
//! `ξ = x/r₀`, lag displacement `σ = tu/r₀`, tracking distance `b = c/r₀`,
//! and the cell-filtered pathloss becomes `G(z) = |z|^{−η}` for `|z| > 1`.
//! The dimensional prefactors are applied by the callers.

use super::{check_lag, AnalyticError, Lags};
use crate::model::{pcf, NetworkGeometry, TrafficModel};
use crate::specfun::{
    integrate_piecewise, integrate_semi_infinite, upper_gamma_scaled, PowerTail, QuadratureSpec,
};

#[inline]
fn unit_gain(z: f64, eta: f64) -> f64 {
    let a = z.abs();
    if a > 1.0 {
        a.powf(-eta)
    } else {
        0.0
    }
}

/// Which side of the cell the first vehicle of a pair sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x > r₀`
    Ahead,
    /// `x < −r₀`
    Behind,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Ahead => 1.0,
            Side::Behind => -1.0,
        }
    }
}

/// `lo`, `hi` and every candidate strictly between them.
fn with_breaks(lo: f64, hi: f64, candidates: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(candidates.into_iter().filter(|p| *p > lo && *p < hi));
    pts
}

/// `∫_1^∞ ξ^{−η} inner(ξ) dξ`, split at `outer_breaks` below `start_tail`
/// and closed with a power-law tail `coef · ξ^{−2η}` beyond it.
fn outer_integral<F: Fn(f64) -> Result<f64, AnalyticError>>(
    inner: F,
    eta: f64,
    outer_breaks: Vec<f64>,
    start_tail: f64,
    tail_coef: f64,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    // errors raised inside the integrand are parked here and re-raised
    let failure = std::cell::RefCell::new(None);
    let integrand = |xi: f64| match inner(xi) {
        Ok(v) => xi.powf(-eta) * v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let start_tail = start_tail.max(1.0);
    let head = integrate_piecewise(integrand, &with_breaks(1.0, start_tail, outer_breaks), spec);
    let tail = integrate_semi_infinite(
        integrand,
        start_tail,
        PowerTail {
            coef: tail_coef,
            exponent: 2.0 * eta,
        },
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(head?.value + tail?.value)
}

/// Exact near-pair integral `2(I₅ + I₆)` by nested quadrature, using the
/// `j = 1` PCF term that governs separations in `(c, 2c)`:
/// `2λμ ∫_{r₀}^∞ (∫_{x+c}^{x+2c} + ∫_{x−2c}^{x−c}) g(x) g(y+tu) e^{−μ(|y−x|−c)} dy dx`.
pub fn i_lt2c_numeric(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    if traffic.c() == 0.0 {
        return Ok(0.0);
    }
    let (eta, r0) = (geom.eta(), geom.r0());
    let b = traffic.c() / r0;
    let sigma = t * geom.u() / r0;
    let m = traffic.mu() * r0;
    let inner = |xi: f64| {
        let f = |d: f64| (-m * (d - b)).exp() * (unit_gain(xi + sigma + d, eta) + unit_gain(xi + sigma - d, eta));
        let cuts = [1.0 - xi - sigma, xi + sigma - 1.0, -1.0 - xi - sigma, xi + sigma + 1.0];
        Ok(integrate_piecewise(f, &with_breaks(b, 2.0 * b, cuts), spec)?.value)
    };
    let outer_breaks = [1.0 - sigma + 2.0 * b, 1.0 - sigma + b, 1.0 - sigma - b, 1.0 - sigma - 2.0 * b].to_vec();
    let start = 4.0 * b + 2.0;
    let tail_coef = 2.0 * b * 2f64.powf(eta);
    let value = outer_integral(inner, eta, outer_breaks, start, tail_coef, spec)?;
    Ok(2.0 * traffic.lambda() * traffic.mu() * r0.powf(2.0 - 2.0 * eta) * value)
}

/// `I₅` from its single-integral form in the upper incomplete gamma function:
/// `λ μ^η ∫_{r₀}^∞ x^{−η} e^w (Γ(1−η, w) − Γ(1−η, w + μc)) dx`,
/// `w = μ(x + tu + c)`.
pub fn i5_numeric(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    if traffic.c() == 0.0 {
        return Ok(0.0);
    }
    let (eta, r0) = (geom.eta(), geom.r0());
    let b = traffic.c() / r0;
    let sigma = t * geom.u() / r0;
    let m = traffic.mu() * r0;
    let cm = traffic.c() * traffic.mu();
    let decay = (-cm).exp();
    let order = 1.0 - eta;
    let m_eta = m.powf(eta);
    // m^η e^w Γ(1−η, w) ≤ (w/m)^{−η} ≤ ξ^{−η}
    let inner = |xi: f64| {
        let w = m * (xi + sigma + b);
        Ok(m_eta * (upper_gamma_scaled(order, w)? - decay * upper_gamma_scaled(order, w + cm)?))
    };
    let value = outer_integral(inner, eta, Vec::new(), 1.0, 1.0, spec)?;
    Ok(traffic.lambda() * r0.powf(1.0 - 2.0 * eta) * value)
}

/// `I₆ = λμ ∫_{r₀}^∞ ∫_{x−2c}^{x−c} g(x) g(y+tu) e^{−μ(x−y−c)} dy dx` by
/// nested quadrature.
pub fn i6_numeric(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    if traffic.c() == 0.0 {
        return Ok(0.0);
    }
    let (eta, r0) = (geom.eta(), geom.r0());
    let b = traffic.c() / r0;
    let sigma = t * geom.u() / r0;
    let m = traffic.mu() * r0;
    let inner = |xi: f64| {
        let f = |d: f64| (-m * (d - b)).exp() * unit_gain(xi + sigma - d, eta);
        let cuts = [xi + sigma - 1.0, xi + sigma + 1.0];
        Ok(integrate_piecewise(f, &with_breaks(b, 2.0 * b, cuts), spec)?.value)
    };
    let outer_breaks = [1.0 - sigma + 2.0 * b, 1.0 - sigma + b].to_vec();
    let value = outer_integral(inner, eta, outer_breaks, 4.0 * b + 2.0, b * 2f64.powf(eta), spec)?;
    Ok(traffic.lambda() * traffic.mu() * r0.powf(2.0 - 2.0 * eta) * value)
}

/// `∫_lo^∞ G(z) dz` for the unit-radius filtered pathloss.
fn gain_beyond(lo: f64, eta: f64, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    let power = |z: f64| z.powf(-eta);
    let tail = PowerTail {
        coef: 1.0,
        exponent: eta,
    };
    if lo >= 1.0 {
        return Ok(integrate_semi_infinite(power, lo, tail, spec)?.value);
    }
    let outside = integrate_semi_infinite(power, 1.0, tail, spec)?.value;
    if lo >= -1.0 {
        return Ok(outside);
    }
    // all of z > 1 plus the part of z < −1 above lo
    Ok(outside + integrate_piecewise(power, &[1.0, -lo], spec)?.value)
}

/// Far-pair terms straight from their definitions, PCF `λ²` beyond `2c`:
/// `λ² ∫_{side} g(x) (∫_{x+2c}^∞ + ∫_{−∞}^{x−2c}) g(y + tu) dy dx`.
///
/// `Side::Ahead` gives `I₁ + I₂` and `Side::Behind` gives `I₃ + I₄`.
pub fn far_pair_terms(
    t: f64,
    side: Side,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Full, traffic, geom)?;
    let (eta, r0) = (geom.eta(), geom.r0());
    let b = traffic.c() / r0;
    let sigma = t * geom.u() / r0;
    let s = side.sign();
    let inner = |xi: f64| {
        let x = s * xi;
        // ∫_{x+2b}^∞ G(v+σ) dv + ∫_{−∞}^{x−2b} G(v+σ) dv, the second by z → −z
        let ahead = gain_beyond(x + 2.0 * b + sigma, eta, spec)?;
        let behind = gain_beyond(-(x - 2.0 * b + sigma), eta, spec)?;
        Ok(ahead + behind)
    };
    let outer_breaks = [
        s * (1.0 - 2.0 * b - sigma),
        s * (-1.0 - 2.0 * b - sigma),
        s * (1.0 + 2.0 * b - sigma),
        s * (-1.0 + 2.0 * b - sigma),
    ]
    .to_vec();
    // inner ≤ 2 ∫_1^∞ G, a constant: the tail envelope ξ^{−2η} does not
    // hold, so integrate the ξ^{−η} decay explicitly
    let failure = std::cell::RefCell::new(None);
    let integrand = |xi: f64| match inner(xi) {
        Ok(v) => xi.powf(-eta) * v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let start = 2.0 * (1.0 + 2.0 * b + sigma);
    let head = integrate_piecewise(integrand, &with_breaks(1.0, start, outer_breaks), spec);
    let tail = integrate_semi_infinite(
        integrand,
        start,
        PowerTail {
            coef: 2.0 / (eta - 1.0),
            exponent: eta,
        },
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let value = head?.value + tail?.value;
    Ok(traffic.lambda() * traffic.lambda() * r0.powf(2.0 - 2.0 * eta) * value)
}

/// The band integral removed from `E{I}²/2` after the order swap:
/// `λ² ∫_{r₀}^∞ ∫_{x ± tu − 2c}^{x ± tu + 2c} g(x) g(z) dz dx`, with `+tu`
/// for `Side::Ahead` (`I₁ + I₂`) and `−tu` for `Side::Behind` (`I₃ + I₄`).
pub fn far_band_integral(
    t: f64,
    side: Side,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Full, traffic, geom)?;
    let (eta, r0) = (geom.eta(), geom.r0());
    let b = traffic.c() / r0;
    if b == 0.0 {
        return Ok(0.0);
    }
    let shift = side.sign() * t * geom.u() / r0;
    let inner = |xi: f64| {
        let centre = xi + shift;
        let f = |z: f64| unit_gain(z, eta);
        Ok(integrate_piecewise(f, &with_breaks(centre - 2.0 * b, centre + 2.0 * b, [-1.0, 1.0]), spec)?.value)
    };
    let outer_breaks = [1.0 - shift - 2.0 * b, 1.0 - shift + 2.0 * b, -1.0 - shift - 2.0 * b, -1.0 - shift + 2.0 * b].to_vec();
    let start = 2.0 * (1.0 + 2.0 * b + shift.abs());
    let tail_coef = 4.0 * b * 2f64.powf(eta);
    let value = outer_integral(inner, eta, outer_breaks, start, tail_coef, spec)?;
    Ok(traffic.lambda() * traffic.lambda() * r0.powf(2.0 - 2.0 * eta) * value)
}

/// Pair integral with the full PCF:
/// `∫_{|x|>r₀} g(x) ∫_{|y−x| ≤ reach} g(y + tu) k(|y − x|) dy dx`
/// for a kernel `k` that is smooth between multiples of `c`.
struct PairIntegral<'a, K> {
    traffic: &'a TrafficModel,
    geom: &'a NetworkGeometry,
    kernel: K,
    /// sup |k| / λ²
    kernel_bound: f64,
    reach: f64,
}

impl<K: Fn(f64) -> f64> PairIntegral<'_, K> {
    fn evaluate(&self, t: f64, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
        let (eta, r0) = (self.geom.eta(), self.geom.r0());
        let b = self.traffic.c() / r0;
        let reach = self.reach / r0;
        let sigma = t * self.geom.u() / r0;
        let knots = (reach / b).round() as i64;
        let knot_points: Vec<f64> = (-knots..=knots).map(|k| k as f64 * b).collect();
        let lam2 = self.traffic.lambda() * self.traffic.lambda();
        let mut total = 0.0;
        for side in [Side::Ahead, Side::Behind] {
            let s = side.sign();
            let inner = |xi: f64| {
                let x = s * xi;
                let f = |d: f64| unit_gain(x + d + sigma, eta) * (self.kernel)(r0 * d.abs()) / lam2;
                let cuts = knot_points
                    .iter()
                    .copied()
                    .chain([1.0 - x - sigma, -1.0 - x - sigma]);
                Ok(integrate_piecewise(f, &with_breaks(-reach, reach, cuts), spec)?.value)
            };
            // where a gain discontinuity meets a PCF knot
            let outer_breaks: Vec<f64> = knot_points
                .iter()
                .flat_map(|&k| [s * (1.0 - sigma - k), s * (-1.0 - sigma - k)])
                .collect();
            let start = 2.0 * (reach + sigma) + 2.0;
            let tail_coef = 2.0 * reach * self.kernel_bound * 2f64.powf(eta);
            total += outer_integral(inner, eta, outer_breaks, start, tail_coef, spec)?;
        }
        Ok(lam2 * r0.powf(2.0 - 2.0 * eta) * total)
    }
}

/// `∫∫ g(x) g(y+tu) (ρ⁽²⁾(|y−x|) − λ²) dy dx`: the pair term minus `E{I}²`,
/// with the PCF deviation integrated out to its cutoff. Valid for any
/// `t ∈ [0, tmax]`.
pub fn pair_correction(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Full, traffic, geom)?;
    if traffic.is_poisson() {
        return Ok(0.0);
    }
    let lam2 = traffic.lambda() * traffic.lambda();
    let peak = traffic.mu() / traffic.lambda() - 1.0;
    PairIntegral {
        traffic,
        geom,
        kernel: |d: f64| pcf(d, traffic).unwrap_or(f64::NAN) - lam2,
        kernel_bound: peak.max(1.0),
        reach: traffic.pcf_cutoff(),
    }
    .evaluate(t, spec)
}

/// `∫∫_{|y−x| < 2c} g(x) g(y+tu) ρ⁽²⁾(|y−x|) dy dx` for any `t ∈ [0, tmax]`.
pub fn near_pair_exact(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Full, traffic, geom)?;
    if traffic.is_poisson() {
        return Ok(0.0);
    }
    PairIntegral {
        traffic,
        geom,
        kernel: |d: f64| pcf(d, traffic).unwrap_or(f64::NAN),
        kernel_bound: traffic.mu() / traffic.lambda(),
        reach: 2.0 * traffic.c(),
    }
    .evaluate(t, spec)
}
