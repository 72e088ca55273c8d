//! Mean, variance, covariance terms and the correlation coefficient of the
//! interference, in closed form and by quadrature.
//!
//! The pair-term approximations hold only for lags in `[t1, t2]`; asking for
//! them outside that window is an error rather than an extrapolation.

mod numeric;
mod terms;

use serde::Serialize;
use thiserror::Error;

use crate::model::{mean_interference, ModelError, NetworkGeometry, TimeLagWindow, TrafficModel};
use crate::specfun::{QuadratureSpec, SpecFunError};

pub use numeric::{
    far_band_integral, far_pair_terms, i5_numeric, i6_numeric, i_lt2c_numeric, near_pair_exact,
    pair_correction, Side,
};
pub use terms::{
    i5_approx, i6_approx, i_gt2c_exact, i_gt2c_expansion, i_lt2c_expansion, i_lt2c_second_order,
    j_term, rho_ppp,
};

/// Relative slack on the lag-window ends, so grids built by `lo + i·step`
/// do not fail on the last point through rounding.
pub(crate) const LAG_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("time lag t = {t} s outside [{lo}, {hi}] s")]
    LagOutOfRange { t: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numeric(#[from] SpecFunError),
    #[error("grid point {index}: {source}")]
    CurvePoint {
        index: usize,
        source: Box<AnalyticError>,
    },
    #[error("time grid not ascending at index {index}")]
    NonAscendingGrid { index: usize },
}

impl AnalyticError {
    /// True for errors that come from leaving a method's lag window rather
    /// than from the numerics.
    pub fn is_domain(&self) -> bool {
        match self {
            AnalyticError::LagOutOfRange { .. } | AnalyticError::Model(_) => true,
            AnalyticError::CurvePoint { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Lags {
    /// `[0, tmax]`
    Full,
    /// `[t1, t2]`
    Regime,
}

pub(crate) fn check_lag(
    t: f64,
    lags: Lags,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
) -> Result<(), AnalyticError> {
    let window = TimeLagWindow::new(traffic, geom)?;
    let (lo, hi) = match lags {
        Lags::Full => (0.0, window.tmax),
        Lags::Regime => (window.t1, window.t2),
    };
    let slack = LAG_SLACK * window.tmax;
    if t.is_finite() && t >= lo - slack && t <= hi + slack {
        Ok(())
    } else {
        Err(AnalyticError::LagOutOfRange { t, lo, hi })
    }
}

/// How the pair term is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Full PCF integrated numerically; any lag in `[0, tmax]`.
    ExactQuadrature,
    /// Closed-form far term with the PCF set to `λ²` beyond `2c`, plus the
    /// numerically integrated near band; lags in `[t1, t2]`.
    PcfApprox,
    /// First order in `c/r₀` and second order in `λc`; lags in `[t1, t2]`.
    Expansion,
    /// Poisson placement of the same intensity.
    Ppp,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::ExactQuadrature, Method::PcfApprox, Method::Expansion, Method::Ppp];

    pub fn tag(self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact-quadrature",
            Method::PcfApprox => "pcf-approx",
            Method::Expansion => "expansion",
            Method::Ppp => "ppp",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.tag() == tag)
    }

    fn lags(self) -> Lags {
        match self {
            Method::PcfApprox | Method::Expansion => Lags::Regime,
            Method::ExactQuadrature | Method::Ppp => Lags::Full,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceMethod {
    /// Same-vehicle term with fading plus the full-PCF pair correction at
    /// zero lag.
    ExactQuadrature,
    /// `4λ r₀^{1−2η}/(2η−1) · (1 − λc)`
    Approx,
    /// `4λ r₀^{1−2η}/(2η−1)`
    Ppp,
}

/// The pieces of `cov(I(τ), I(τ+t))`.
///
/// `covariance` is assembled without forming `mean_sq` and subtracting it
/// back, so it is accurate even when it is small next to `E{I}²`; it equals
/// `j_term + i_gt2c + i_lt2c − mean_sq` up to rounding in `mean_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceBreakdown {
    pub j_term: f64,
    pub i_gt2c: f64,
    pub i_lt2c: f64,
    pub mean_sq: f64,
    pub covariance: f64,
    pub method: Method,
}

pub fn covariance(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    method: Method,
) -> Result<CovarianceBreakdown, AnalyticError> {
    covariance_with(t, traffic, geom, method, &QuadratureSpec::default())
}

pub fn covariance_with(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    method: Method,
    spec: &QuadratureSpec,
) -> Result<CovarianceBreakdown, AnalyticError> {
    check_lag(t, method.lags(), traffic, geom)?;
    let mean = mean_interference(traffic, geom);
    let mean_sq = mean * mean;
    let j = j_term(t, traffic, geom)?;
    let (i_gt2c, i_lt2c, covariance) = match method {
        Method::Ppp => (mean_sq, 0.0, j),
        Method::Expansion => {
            let load = 1.0 - traffic.load();
            (
                i_gt2c_expansion(t, traffic, geom)?,
                i_lt2c_expansion(t, traffic, geom)?,
                j * load * load,
            )
        }
        Method::PcfApprox => {
            let deficit = terms::far_band_deficit(t, traffic, geom)?;
            let near = i_lt2c_numeric(t, traffic, geom, spec)?;
            (mean_sq - deficit, near, j - deficit + near)
        }
        Method::ExactQuadrature => {
            let correction = pair_correction(t, traffic, geom, spec)?;
            let near = near_pair_exact(t, traffic, geom, spec)?;
            (mean_sq + correction - near, near, j + correction)
        }
    };
    Ok(CovarianceBreakdown {
        j_term: j,
        i_gt2c,
        i_lt2c,
        mean_sq,
        covariance,
        method,
    })
}

pub fn variance(traffic: &TrafficModel, geom: &NetworkGeometry, method: VarianceMethod) -> Result<f64, AnalyticError> {
    variance_with(traffic, geom, method, &QuadratureSpec::default())
}

pub fn variance_with(
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    method: VarianceMethod,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let ppp = 2.0 * traffic.lambda() * terms::square_gain(geom);
    Ok(match method {
        VarianceMethod::Ppp => ppp,
        VarianceMethod::Approx => ppp * (1.0 - traffic.load()),
        // E{h²} = 2 doubles the same-vehicle term at zero lag
        VarianceMethod::ExactQuadrature => ppp + pair_correction(0.0, traffic, geom, spec)?,
    })
}

/// Pearson correlation coefficient of the interference at lag `t`.
///
/// `PcfApprox` divides its covariance by the approximate variance, the
/// pairing used for the published curves; `ExactQuadrature` uses the exact
/// variance.
pub fn rho(t: f64, traffic: &TrafficModel, geom: &NetworkGeometry, method: Method) -> Result<f64, AnalyticError> {
    rho_with(t, traffic, geom, method, &QuadratureSpec::default())
}

pub fn rho_with(
    t: f64,
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    method: Method,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    check_lag(t, method.lags(), traffic, geom)?;
    match method {
        Method::Ppp => rho_ppp(t, geom),
        Method::Expansion => Ok((1.0 - traffic.load()) * rho_ppp(t, geom)?),
        Method::PcfApprox => {
            let cov = covariance_with(t, traffic, geom, method, spec)?.covariance;
            Ok(cov / variance_with(traffic, geom, VarianceMethod::Approx, spec)?)
        }
        Method::ExactQuadrature => {
            let cov = covariance_with(t, traffic, geom, method, spec)?.covariance;
            Ok(cov / variance_with(traffic, geom, VarianceMethod::ExactQuadrature, spec)?)
        }
    }
}

/// `ρ(t)` on a time grid, tagged with its method and parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub traffic: TrafficModel,
    pub geom: NetworkGeometry,
}

pub fn curve(
    t_grid: &[f64],
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    method: Method,
) -> Result<AnalyticCurve, AnalyticError> {
    curve_with(t_grid, traffic, geom, method, &QuadratureSpec::default())
}

pub fn curve_with(
    t_grid: &[f64],
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    method: Method,
    spec: &QuadratureSpec,
) -> Result<AnalyticCurve, AnalyticError> {
    if let Some(index) = t_grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(AnalyticError::NonAscendingGrid { index: index + 1 });
    }
    let values = t_grid
        .iter()
        .enumerate()
        .map(|(index, &t)| {
            rho_with(t, traffic, geom, method, spec).map_err(|e| AnalyticError::CurvePoint {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AnalyticCurve {
        t_grid: t_grid.to_vec(),
        values,
        method,
        traffic: *traffic,
        geom: *geom,
    })
}
