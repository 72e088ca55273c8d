//! Temporal correlation of interference at a base station on a road whose
//! vehicles follow shifted-exponential headways.
//!
//! Vehicles move at a common speed past a cell of radius `r₀`; only those
//! outside the cell interfere, with pathloss `|r|^{−η}` and Rayleigh fading.
//! The crate evaluates the correlation coefficient `ρ(t)` between the
//! interference at two slots separated by a lag `t`:
//!
//! - [`analytic`]: closed forms in `₂F₁`, nested quadrature of the exact
//!   pair terms, and the small-`λc` expansions, each tagged by [`analytic::Method`];
//! - [`sim`]: stationary sampling of the headway process and Monte Carlo
//!   estimation with jackknife errors;
//! - [`cli`]: sweep configuration and CSV/JSON output driving the
//!   `headway-corr` binary.
//!
//! See `examples/` for one runnable program per capability.

pub mod analytic;
pub mod cli;
pub mod model;
pub mod sim;
pub mod specfun;

pub use model::{
    mean_interference, pathloss, pcf, pcf_normalized, ModelError, NetworkGeometry, TimeLagWindow,
    TrafficModel,
};
