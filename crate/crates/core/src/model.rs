//! Traffic and geometry parameters, the cell-filtered pathloss, the pair
//! correlation function of the shifted-exponential headway process, and the
//! Campbell mean of the interference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::ln_gamma;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid traffic parameters: {0}")]
    Traffic(String),
    #[error("invalid network geometry: {0}")]
    Geometry(String),
    #[error("argument outside domain: {0}")]
    Argument(String),
    #[error("empty time-lag window: t1 = {t1} s exceeds t2 = {t2} s (tracking distance too large for the cell)")]
    EmptyLagWindow { t1: f64, t2: f64 },
}

/// Separations beyond this many tracking distances use the `λ²` asymptote.
pub const PCF_MAX_CUTOFF: f64 = 64.0;
/// Relative distance to `λ²` under which the PCF counts as converged.
pub const PCF_CONVERGED: f64 = 1e-12;

/// Vehicle intensity `λ` (1/m), tracking distance `c` (m) and the rate `μ`
/// (1/m) of the exponential free part of each headway.
///
/// `λ = μ / (1 + μc)`; `λc < 1` is the jamming bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "TrafficParams", try_from = "TrafficParams")]
pub struct TrafficModel {
    lambda: f64,
    c: f64,
    mu: f64,
    pcf_cutoff: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct TrafficParams {
    lambda: f64,
    c: f64,
}

impl From<TrafficModel> for TrafficParams {
    fn from(t: TrafficModel) -> Self {
        TrafficParams {
            lambda: t.lambda,
            c: t.c,
        }
    }
}

impl TryFrom<TrafficParams> for TrafficModel {
    type Error = ModelError;
    fn try_from(p: TrafficParams) -> Result<Self, Self::Error> {
        TrafficModel::new(p.lambda, p.c)
    }
}

impl TrafficModel {
    /// From intensity and tracking distance; derives `μ = λ / (1 − λc)`.
    pub fn new(lambda: f64, c: f64) -> Result<Self, ModelError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ModelError::Traffic(format!("lambda must be > 0, got {lambda}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(ModelError::Traffic(format!("c must be >= 0, got {c}")));
        }
        if lambda * c >= 1.0 {
            return Err(ModelError::Traffic(format!(
                "lambda*c = {} reaches the jamming bound 1",
                lambda * c
            )));
        }
        let mu = if c == 0.0 { lambda } else { lambda / (1.0 - lambda * c) };
        Ok(Self::assemble(lambda, c, mu))
    }

    /// From the free-headway rate and tracking distance; derives
    /// `λ = μ / (1 + μc)`.
    pub fn from_rate(mu: f64, c: f64) -> Result<Self, ModelError> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(ModelError::Traffic(format!("mu must be > 0, got {mu}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(ModelError::Traffic(format!("c must be >= 0, got {c}")));
        }
        let lambda = if c == 0.0 { mu } else { mu / (1.0 + mu * c) };
        Ok(Self::assemble(lambda, c, mu))
    }

    /// The Poisson special case `c = 0`.
    pub fn poisson(lambda: f64) -> Result<Self, ModelError> {
        Self::new(lambda, 0.0)
    }

    fn assemble(lambda: f64, c: f64, mu: f64) -> Self {
        let mut model = TrafficModel {
            lambda,
            c,
            mu,
            pcf_cutoff: 0.0,
        };
        model.pcf_cutoff = model.find_pcf_cutoff();
        model
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `λc`, the fraction of the road occupied by tracking distances.
    pub fn load(&self) -> f64 {
        self.lambda * self.c
    }

    pub fn is_poisson(&self) -> bool {
        self.c == 0.0
    }

    /// Separation (m) beyond which [`pcf`] returns `λ²`.
    pub fn pcf_cutoff(&self) -> f64 {
        self.pcf_cutoff
    }

    /// Smallest multiple of `c` from which a two-`c` span of the finite sum
    /// stays within [`PCF_CONVERGED`] of `λ²`, capped at [`PCF_MAX_CUTOFF`].
    fn find_pcf_cutoff(&self) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        const SAMPLES_PER_C: usize = 16;
        let target = self.lambda * self.lambda;
        let converged_at = |d: f64| (pcf_series(d, self) / target - 1.0).abs() < PCF_CONVERGED;
        let mut k = 2;
        while (k as f64) < PCF_MAX_CUTOFF {
            let span_ok = (0..2 * SAMPLES_PER_C)
                .map(|i| self.c * (k as f64 + i as f64 / SAMPLES_PER_C as f64))
                .all(converged_at);
            if span_ok {
                return k as f64 * self.c;
            }
            k += 1;
        }
        PCF_MAX_CUTOFF * self.c
    }
}

/// Cell radius `r₀` (m), pathloss exponent `η`, common speed `u` (m/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryParams")]
pub struct NetworkGeometry {
    r0: f64,
    eta: f64,
    u: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct GeometryParams {
    r0: f64,
    eta: f64,
    u: f64,
}

impl TryFrom<GeometryParams> for NetworkGeometry {
    type Error = ModelError;
    fn try_from(p: GeometryParams) -> Result<Self, Self::Error> {
        NetworkGeometry::new(p.r0, p.eta, p.u)
    }
}

impl NetworkGeometry {
    pub fn new(r0: f64, eta: f64, u: f64) -> Result<Self, ModelError> {
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(ModelError::Geometry(format!("r0 must be > 0, got {r0}")));
        }
        if !(eta.is_finite() && eta > 2.0) {
            return Err(ModelError::Geometry(format!("eta must be > 2, got {eta}")));
        }
        if !(u.is_finite() && u > 0.0) {
            return Err(ModelError::Geometry(format!("u must be > 0, got {u}")));
        }
        Ok(NetworkGeometry { r0, eta, u })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Largest lag without double handover, `2r₀/u`.
    pub fn tmax(&self) -> f64 {
        2.0 * self.r0 / self.u
    }
}

/// Lag boundaries: `t1 = 2c/u`, `t2 = (2r₀ − 2c)/u`, `tmax = 2r₀/u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeLagWindow {
    pub t1: f64,
    pub t2: f64,
    pub tmax: f64,
    b: f64,
}

impl TimeLagWindow {
    pub fn new(traffic: &TrafficModel, geom: &NetworkGeometry) -> Result<Self, ModelError> {
        let t1 = 2.0 * traffic.c() / geom.u();
        let t2 = (2.0 * geom.r0() - 2.0 * traffic.c()) / geom.u();
        if t1 > t2 {
            return Err(ModelError::EmptyLagWindow { t1, t2 });
        }
        Ok(TimeLagWindow {
            t1,
            t2,
            tmax: geom.tmax(),
            b: traffic.c() / geom.r0(),
        })
    }

    /// Tracking distance relative to the cell radius, `c/r₀`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t1 && t <= self.t2
    }
}

/// Cell-filtered pathloss: `|r|^{−η}` outside the cell, 0 for `|r| ≤ r₀`.
#[inline]
pub fn pathloss(r: f64, geom: &NetworkGeometry) -> f64 {
    let d = r.abs();
    if d > geom.r0 {
        d.powf(-geom.eta)
    } else {
        0.0
    }
}

/// Pair correlation function of the headway process at separation `d ≥ 0`.
///
/// For `d ∈ [kc, (k+1)c)` this is
/// `λ Σ_{j=1..k} μ^j (d − jc)^{j−1} e^{−μ(d−jc)} / Γ(j)`,
/// zero below `c`, and `λ²` past [`TrafficModel::pcf_cutoff`]. A Poisson
/// model returns `λ²` for every `d > 0`.
pub fn pcf(d: f64, traffic: &TrafficModel) -> Result<f64, ModelError> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(ModelError::Argument(format!("separation must be >= 0, got {d}")));
    }
    Ok(pcf_unchecked(d, traffic))
}

#[inline]
pub(crate) fn pcf_unchecked(d: f64, traffic: &TrafficModel) -> f64 {
    if traffic.c == 0.0 {
        return if d > 0.0 { traffic.lambda * traffic.lambda } else { 0.0 };
    }
    if d < traffic.c {
        return 0.0;
    }
    if d > traffic.pcf_cutoff {
        return traffic.lambda * traffic.lambda;
    }
    pcf_series(d, traffic)
}

/// The finite sum itself, without the asymptote shortcut. Terms are formed in
/// the log domain so large `k` cannot overflow.
fn pcf_series(d: f64, traffic: &TrafficModel) -> f64 {
    let (lambda, c, mu) = (traffic.lambda, traffic.c, traffic.mu);
    let k = (d / c).floor() as usize;
    let ln_mu = mu.ln();
    let mut sum = 0.0;
    for j in 1..=k {
        let excess = d - j as f64 * c;
        if excess < 0.0 {
            break;
        }
        let term = if excess == 0.0 {
            // (d − jc)^{j−1} at the left edge: 1 for j = 1, else 0
            if j == 1 {
                mu
            } else {
                0.0
            }
        } else {
            let jf = j as f64;
            (jf * ln_mu + (jf - 1.0) * excess.ln() - mu * excess - ln_gamma(jf)).exp()
        };
        sum += term;
    }
    lambda * sum
}

/// `pcf(d)/(λμ)` at `d = d_over_c · c`; tends to `1 − λc`.
pub fn pcf_normalized(d_over_c: f64, traffic: &TrafficModel) -> Result<f64, ModelError> {
    if traffic.c == 0.0 {
        return Err(ModelError::Argument(
            "normalized PCF needs a positive tracking distance".into(),
        ));
    }
    if !(d_over_c.is_finite() && d_over_c >= 0.0) {
        return Err(ModelError::Argument(format!(
            "normalized separation must be >= 0, got {d_over_c}"
        )));
    }
    Ok(pcf_unchecked(d_over_c * traffic.c, traffic) / (traffic.lambda * traffic.mu))
}

/// Campbell mean `E{I} = 2λ r₀^{1−η}/(η − 1)`; depends on `λ` only.
pub fn mean_interference(traffic: &TrafficModel, geom: &NetworkGeometry) -> f64 {
    2.0 * traffic.lambda * geom.r0.powf(1.0 - geom.eta) / (geom.eta - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_semi_infinite, PowerTail, QuadratureSpec};
    use proptest::prelude::*;

    fn fig4() -> NetworkGeometry {
        NetworkGeometry::new(150.0, 3.0, 10.0).unwrap()
    }

    #[test]
    fn rate_relations() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        assert!((t.mu() - 0.0625).abs() < 1e-15);
        let back = TrafficModel::from_rate(t.mu(), 4.0).unwrap();
        assert!((back.lambda() - 0.05).abs() < 1e-15);
        let p = TrafficModel::poisson(0.05).unwrap();
        assert_eq!(p.mu(), p.lambda());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(TrafficModel::new(0.0, 1.0).is_err());
        assert!(TrafficModel::new(0.1, -1.0).is_err());
        assert!(TrafficModel::new(0.25, 4.0).is_err());
        assert!(TrafficModel::new(f64::NAN, 1.0).is_err());
        assert!(NetworkGeometry::new(150.0, 2.0, 10.0).is_err());
        assert!(NetworkGeometry::new(0.0, 3.0, 10.0).is_err());
        assert!(NetworkGeometry::new(150.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn lag_window() {
        let w = TimeLagWindow::new(&TrafficModel::new(0.05, 4.0).unwrap(), &fig4()).unwrap();
        assert!((w.t1 - 0.8).abs() < 1e-15);
        assert!((w.t2 - 29.2).abs() < 1e-12);
        assert!((w.tmax - 30.0).abs() < 1e-12);
        assert!((w.b() - 4.0 / 150.0).abs() < 1e-15);
        let p = TimeLagWindow::new(&TrafficModel::poisson(0.05).unwrap(), &fig4()).unwrap();
        assert_eq!(p.t1, 0.0);
        let wide = TrafficModel::new(0.001, 100.0).unwrap();
        assert!(matches!(
            TimeLagWindow::new(&wide, &fig4()),
            Err(ModelError::EmptyLagWindow { .. })
        ));
    }

    #[test]
    fn pathloss_examples() {
        let g = fig4();
        assert!((pathloss(300.0, &g) - 3.7037037037e-8).abs() < 1e-17);
        assert_eq!(pathloss(100.0, &g), 0.0);
        assert_eq!(pathloss(-150.0, &g), 0.0);
        assert_eq!(pathloss(150.0, &g), 0.0);
        assert_eq!(pathloss(-300.0, &g), pathloss(300.0, &g));
    }

    #[test]
    fn pcf_examples() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        assert_eq!(pcf(2.0, &t).unwrap(), 0.0);
        // k = 1 term with zero excess: λμ
        assert!((pcf(4.0, &t).unwrap() - 3.125e-3).abs() < 1e-15);
        assert!((pcf(4.0 + 1e-9, &t).unwrap() - 3.125e-3).abs() < 1e-12);
        assert!((pcf(400.0, &t).unwrap() - 2.5e-3).abs() < 1e-15);
        assert!(pcf(-1.0, &t).is_err());
    }

    #[test]
    fn pcf_second_band_by_hand() {
        // d ∈ [2c, 3c): λ(μ e^{−μ(d−c)} + μ²(d−2c) e^{−μ(d−2c)})
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let (mu, d) = (t.mu(), 9.5);
        let expected = 0.05 * (mu * (-mu * (d - 4.0)).exp() + mu * mu * (d - 8.0) * (-mu * (d - 8.0)).exp());
        assert!((pcf(d, &t).unwrap() - expected).abs() < 1e-16);
    }

    #[test]
    fn pcf_normalized_examples() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        assert!((pcf_normalized(1.0, &t).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(pcf_normalized(0.9, &t).unwrap(), 0.0);
        assert!((pcf_normalized(1000.0, &t).unwrap() - 0.8).abs() < 1e-12);
        assert!(pcf_normalized(1.0, &TrafficModel::poisson(0.05).unwrap()).is_err());
    }

    #[test]
    fn pcf_cutoff_is_converged() {
        for &(lambda, c) in &[(0.05, 4.0), (0.02, 4.0), (0.2, 4.0), (0.0025, 4.0)] {
            let t = TrafficModel::new(lambda, c).unwrap();
            let cut = t.pcf_cutoff();
            assert!(cut >= 2.0 * c && cut <= PCF_MAX_CUTOFF * c);
            let below = pcf_series(cut - 1e-9, &t);
            assert!((below / (lambda * lambda) - 1.0).abs() < 1e-10, "lambda={lambda}");
        }
    }

    #[test]
    fn pcf_right_continuous_at_band_edges() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        for k in 2..10 {
            let d = k as f64 * 4.0;
            let at = pcf(d, &t).unwrap();
            let right = pcf(d + 1e-10, &t).unwrap();
            assert!((at - right).abs() < 1e-9 * at, "k={k}");
            let left = pcf(d - 1e-10, &t).unwrap();
            assert!((at - left).abs() < 1e-9 * at, "continuous at k={k}");
        }
    }

    #[test]
    fn mean_interference_examples() {
        let g = fig4();
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let m = mean_interference(&t, &g);
        assert!((m - 0.05 / 22500.0).abs() < 1e-20);
        let spec = QuadratureSpec::default();
        let tail = PowerTail {
            coef: 1.0,
            exponent: 3.0,
        };
        let oracle = 2.0 * 0.05 * integrate_semi_infinite(|r: f64| r.powi(-3), 150.0, tail, &spec).unwrap().value;
        assert!(((m - oracle) / m).abs() < 1e-10);
        let doubled = mean_interference(&TrafficModel::new(0.1, 4.0).unwrap(), &g);
        assert!((doubled - 2.0 * m).abs() < 1e-20);
        assert_eq!(m, mean_interference(&TrafficModel::poisson(0.05).unwrap(), &g));
    }

    #[test]
    fn serde_round_trip_validates() {
        let t: TrafficModel = serde_json::from_str(r#"{"lambda":0.05,"c":4.0}"#).unwrap();
        assert_eq!(t, TrafficModel::new(0.05, 4.0).unwrap());
        assert!(serde_json::from_str::<TrafficModel>(r#"{"lambda":0.5,"c":4.0}"#).is_err());
        assert!(serde_json::from_str::<NetworkGeometry>(r#"{"r0":150,"eta":1.5,"u":10}"#).is_err());
    }

    proptest! {
        #[test]
        fn rate_round_trip(lambda in 1e-4..1.0f64, load in 0.0..0.95f64) {
            let c = load / lambda;
            let t = TrafficModel::new(lambda, c).unwrap();
            prop_assert!((t.mu() * (1.0 - lambda * c) - lambda).abs() <= 1e-12 * lambda);
            let back = TrafficModel::from_rate(t.mu(), c).unwrap();
            prop_assert!((back.lambda() - lambda).abs() <= 1e-12 * lambda);
        }

        #[test]
        fn hardcore_exclusion(lambda in 1e-3..0.2f64, load in 0.01..0.9f64, frac in 0.0..1.0f64) {
            let t = TrafficModel::new(lambda, load / lambda).unwrap();
            prop_assert_eq!(pcf(frac * t.c() * 0.999_999, &t).unwrap(), 0.0);
        }

        #[test]
        fn poisson_pcf_is_flat(lambda in 1e-3..1.0f64, d in 1e-6..1e4f64) {
            let t = TrafficModel::poisson(lambda).unwrap();
            prop_assert_eq!(pcf(d, &t).unwrap(), lambda * lambda);
        }

        #[test]
        fn mean_ignores_tracking_distance(lambda in 1e-3..0.2f64, load in 0.0..0.9f64) {
            let g = NetworkGeometry::new(150.0, 3.0, 10.0).unwrap();
            let t = TrafficModel::new(lambda, load / lambda).unwrap();
            prop_assert_eq!(mean_interference(&t, &g), mean_interference(&TrafficModel::poisson(lambda).unwrap(), &g));
        }
    }
}
