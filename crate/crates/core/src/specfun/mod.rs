//! Real-argument special functions and adaptive quadrature.
//!
//! Only the pieces the interference closed forms need: the Gauss
//! hypergeometric function on the parameter families `c > b > 0`, `z < 1`,
//! the upper incomplete gamma function for real (including negative) order,
//! and Gauss-Kronrod quadrature on finite and power-law-decaying
//! semi-infinite ranges.

mod gamma;
mod hyp2f1;
mod quad;

pub use gamma::{ln_gamma, upper_gamma, upper_gamma_scaled};
pub use hyp2f1::hyp2f1;
pub use quad::{
    integrate_finite, integrate_piecewise, integrate_semi_infinite, Estimate, PowerTail,
    QuadratureSpec, TailedEstimate,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{function}: argument outside supported domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("{what} did not converge: best estimate {estimate:e}, error bound {error:e}")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },
}

impl SpecFunError {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        SpecFunError::Domain {
            function,
            detail: detail.into(),
        }
    }
}
