//! Closed-form covariance terms in `₂F₁`.

use super::{check_lag, Lags, AnalyticError};
use crate::model::{mean_interference, NetworkGeometry, TrafficModel};
use crate::specfun::hyp2f1;

/// `₂F₁(2η−1, η; 2η; z)`, the kernel shared by the single-vehicle term, the
/// expansions and the Poisson correlation.
pub(crate) fn kernel(eta: f64, z: f64) -> Result<f64, AnalyticError> {
    Ok(hyp2f1(2.0 * eta - 1.0, eta, 2.0 * eta, z)?)
}

/// `2 r₀^{1−2η}/(2η−1)`, i.e. `∫ g²` over both sides of the cell.
pub(crate) fn square_gain(geom: &NetworkGeometry) -> f64 {
    let eta = geom.eta();
    2.0 * geom.r0().powf(1.0 - 2.0 * eta) / (2.0 * eta - 1.0)
}

/// Same-vehicle contribution `J(t) = (2λ r₀^{1−2η}/(2η−1)) ₂F₁(2η−1, η; 2η; −tu/r₀)`.
pub fn j_term(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Full, traffic, geom)?;
    let sigma = t * geom.u() / geom.r0();
    Ok(traffic.lambda() * square_gain(geom) * kernel(geom.eta(), -sigma)?)
}

/// `2λ² ∫_{r₀}^∞ ∫_{x+tu−2c}^{x+tu+2c} x^{−η} z^{−η} dz dx`: what removing
/// the `|y − x| < 2c` band takes away from `E{I}²` in the far-pair term.
pub(crate) fn far_band_deficit(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    let eta = geom.eta();
    let r0 = geom.r0();
    let b = traffic.c() / r0;
    let sigma = t * geom.u() / r0;
    let plus = 2.0 * b + sigma;
    let minus = 2.0 * b - sigma;
    let f1 = |z: f64| hyp2f1(2.0 * eta - 2.0, eta, 2.0 * eta - 1.0, z);
    let f2 = |z: f64| hyp2f1(2.0 * eta - 1.0, eta, 2.0 * eta, z);
    let lam2 = traffic.lambda() * traffic.lambda();
    let scale = r0.powf(2.0 - 2.0 * eta) * lam2;
    let first = (f1(-plus)? - f1(minus)?) / ((eta - 1.0) * (eta - 1.0));
    let second = 2.0 * (minus * f2(minus)? + plus * f2(-plus)?) / ((2.0 * eta - 1.0) * (eta - 1.0));
    Ok(-scale * (first + second))
}

/// Far-pair term `I_{>2c}(t)` with the PCF replaced by `λ²` beyond `2c`,
/// in closed form. Requires `t ∈ [t1, t2]`.
pub fn i_gt2c_exact(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    let mean = mean_interference(traffic, geom);
    Ok(mean * mean - far_band_deficit(t, traffic, geom)?)
}

/// Correction of `I_{>2c}` to first order in `b = c/r₀`:
/// `8λ²c r₀^{1−2η}/(2η−1) · ₂F₁(2η−1, η; 2η; −tu/r₀)`.
pub(crate) fn far_band_deficit_expansion(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    let eta = geom.eta();
    let sigma = t * geom.u() / geom.r0();
    let lam2 = traffic.lambda() * traffic.lambda();
    Ok(8.0 * lam2 * traffic.c() * geom.r0().powf(1.0 - 2.0 * eta) / (2.0 * eta - 1.0) * kernel(eta, -sigma)?)
}

/// `I_{>2c}(t)` expanded for small `c/r₀`.
pub fn i_gt2c_expansion(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    let mean = mean_interference(traffic, geom);
    Ok(mean * mean - far_band_deficit_expansion(t, traffic, geom)?)
}

struct NearBand {
    eta: f64,
    r0: f64,
    lambda: f64,
    mu: f64,
    c: f64,
}

impl NearBand {
    fn new(traffic: &TrafficModel, geom: &NetworkGeometry) -> Self {
        NearBand {
            eta: geom.eta(),
            r0: geom.r0(),
            lambda: traffic.lambda(),
            mu: traffic.mu(),
            c: traffic.c(),
        }
    }

    /// `λ r₀^{−2η} (A r₀/(2η−1) ₂F₁(η, 2η−1; 2η; z) + B/(2μ) ₂F₁(2η, η+1; 2η+1; z))`
    fn evaluate(&self, z: f64, lead: f64, next: f64) -> Result<f64, AnalyticError> {
        let eta = self.eta;
        let f_lead = hyp2f1(eta, 2.0 * eta - 1.0, 2.0 * eta, z)?;
        let f_next = hyp2f1(2.0 * eta, eta + 1.0, 2.0 * eta + 1.0, z)?;
        Ok(self.lambda
            * self.r0.powf(-2.0 * eta)
            * (lead * self.r0 / (2.0 * eta - 1.0) * f_lead + next / (2.0 * self.mu) * f_next))
    }
}

/// Large-`w` approximation of `I₅`, pairs with the follower `c..2c` ahead.
pub fn i5_approx(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    if traffic.c() == 0.0 {
        return Ok(0.0);
    }
    let band = NearBand::new(traffic, geom);
    let cm = band.c * band.mu;
    let e = (-cm).exp();
    let z = -(band.c + t * geom.u()) / band.r0;
    band.evaluate(z, 1.0 - e, cm * e - 1.0 + e)
}

/// Large-`w` approximation of `I₆`, pairs with the follower `c..2c` behind.
pub fn i6_approx(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    if traffic.c() == 0.0 {
        return Ok(0.0);
    }
    let band = NearBand::new(traffic, geom);
    let cm = band.c * band.mu;
    let e = (-cm).exp();
    let z = (band.c - t * geom.u()) / band.r0;
    band.evaluate(z, 1.0 - e, 1.0 - cm * e - e)
}

/// `2(I₅ + I₆)` expanded to second order in `λc`, before the small-`b` step.
pub fn i_lt2c_second_order(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    let eta = geom.eta();
    let r0 = geom.r0();
    let (lambda, c) = (traffic.lambda(), traffic.c());
    if c == 0.0 {
        return Ok(0.0);
    }
    let b = c / r0;
    let sigma = t * geom.u() / r0;
    let fa = |z: f64| hyp2f1(eta, 2.0 * eta - 1.0, 2.0 * eta, z);
    let fb = |z: f64| hyp2f1(2.0 * eta, eta + 1.0, 2.0 * eta + 1.0, z);
    let lead = 2.0 * (2.0 + c * lambda) * (fa(b - sigma)? + fa(-b - sigma)?);
    let next = b * (2.0 * eta - 1.0) * (fb(b - sigma)? - fb(-b - sigma)?);
    Ok(lambda * lambda * c * r0.powf(1.0 - 2.0 * eta) / (2.0 * (2.0 * eta - 1.0)) * (lead + next))
}

/// Near-pair term `I_{<2c}` for small `λc` and small `c/r₀`:
/// `2λ²c(2 + λc) r₀^{1−2η}/(2η−1) · ₂F₁(2η−1, η; 2η; −tu/r₀)`.
pub fn i_lt2c_expansion(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    check_lag(t, Lags::Regime, traffic, geom)?;
    let eta = geom.eta();
    let (lambda, c) = (traffic.lambda(), traffic.c());
    let sigma = t * geom.u() / geom.r0();
    Ok(2.0 * lambda * lambda * c * (2.0 + lambda * c) * geom.r0().powf(1.0 - 2.0 * eta) / (2.0 * eta - 1.0)
        * kernel(eta, -sigma)?)
}

/// Correlation under Poisson placement, `½ ₂F₁(2η−1, η; 2η; −tu/r₀)`.
pub fn rho_ppp(t: f64, geom: &NetworkGeometry) -> Result<f64, AnalyticError> {
    let tmax = geom.tmax();
    if !(t.is_finite() && t >= 0.0 && t <= tmax * (1.0 + super::LAG_SLACK)) {
        return Err(AnalyticError::LagOutOfRange { t, lo: 0.0, hi: tmax });
    }
    Ok(0.5 * kernel(geom.eta(), -t * geom.u() / geom.r0())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> NetworkGeometry {
        NetworkGeometry::new(150.0, 3.0, 10.0).unwrap()
    }

    #[test]
    fn j_term_at_zero_lag() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let j = j_term(0.0, &t, &geom()).unwrap();
        assert!((j - 2.0 * 0.05 * 150f64.powi(-5) / 5.0).abs() < 1e-25);
        assert!((j - 2.6337e-13).abs() < 1e-17);
        let j2 = j_term(7.0, &TrafficModel::new(0.1, 4.0).unwrap(), &geom()).unwrap();
        assert!((j2 - 2.0 * j_term(7.0, &t, &geom()).unwrap()).abs() < 1e-25);
        assert!(j_term(30.5, &t, &geom()).is_err());
        assert!(j_term(-0.1, &t, &geom()).is_err());
    }

    #[test]
    fn far_term_degenerates_without_tracking_distance() {
        let t = TrafficModel::poisson(0.05).unwrap();
        let m = mean_interference(&t, &geom());
        for &lag in &[0.0, 3.0, 17.0] {
            assert_eq!(i_gt2c_exact(lag, &t, &geom()).unwrap(), m * m);
            assert_eq!(i_gt2c_expansion(lag, &t, &geom()).unwrap(), m * m);
        }
    }

    #[test]
    fn far_term_below_mean_square() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let m = mean_interference(&t, &geom());
        for &lag in &[0.8, 1.0, 10.0, 29.2] {
            let v = i_gt2c_exact(lag, &t, &geom()).unwrap();
            assert!(v < m * m && v > 0.9 * m * m, "t={lag}");
        }
        assert!(i_gt2c_exact(0.5, &t, &geom()).is_err());
        assert!(i_gt2c_exact(29.5, &t, &geom()).is_err());
    }

    #[test]
    fn expansion_error_is_order_b() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let m = mean_interference(&t, &geom());
        let b = 4.0 / 150.0;
        for lag in [0.8, 2.0, 5.0, 10.0, 20.0, 29.2] {
            let exact = i_gt2c_exact(lag, &t, &geom()).unwrap();
            let approx = i_gt2c_expansion(lag, &t, &geom()).unwrap();
            let correction = m * m - approx;
            let gap = (exact - approx).abs() / correction;
            assert!(gap < 10.0 * b, "t={lag}: gap {gap}");
        }
    }

    #[test]
    fn near_terms_vanish_without_tracking_distance() {
        let t = TrafficModel::poisson(0.05).unwrap();
        for lag in [0.0, 4.0, 29.0] {
            assert_eq!(i5_approx(lag, &t, &geom()).unwrap(), 0.0);
            assert_eq!(i6_approx(lag, &t, &geom()).unwrap(), 0.0);
            assert_eq!(i_lt2c_expansion(lag, &t, &geom()).unwrap(), 0.0);
            assert_eq!(i_lt2c_second_order(lag, &t, &geom()).unwrap(), 0.0);
        }
    }

    #[test]
    fn near_expansion_ratio_to_single_vehicle_term() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        for lag in [0.8, 6.0, 29.2] {
            let ratio = i_lt2c_expansion(lag, &t, &geom()).unwrap() / j_term(lag, &t, &geom()).unwrap();
            assert!((ratio - 0.2 * 2.2).abs() < 1e-13);
        }
    }

    #[test]
    fn second_order_form_close_to_expansion() {
        let t = TrafficModel::new(0.02, 4.0).unwrap();
        for lag in [1.0, 10.0] {
            let a = i_lt2c_second_order(lag, &t, &geom()).unwrap();
            let b = i_lt2c_expansion(lag, &t, &geom()).unwrap();
            assert!(((a - b) / b).abs() < 0.01);
        }
    }

    #[test]
    fn rho_ppp_values() {
        let g = geom();
        assert_eq!(rho_ppp(0.0, &g).unwrap(), 0.5);
        let mut prev = 0.5;
        for i in 1..=60 {
            let r = rho_ppp(i as f64 * 0.5, &g).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(rho_ppp(31.0, &g).is_err());
    }
}
