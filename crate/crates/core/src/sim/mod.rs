//! Monte Carlo side: stationary sampling of the shifted-exponential headway
//! process, interference with Rayleigh fading at two slots, and streaming
//! estimation of the correlation coefficient.

mod estimate;
mod histogram;
mod moments;

pub use estimate::{CorrelationEstimate, MonteCarlo, JACKKNIFE_BLOCKS};
pub use histogram::{pair_distance_histogram, PairHistogram};
pub use moments::CoMoments;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1};
use serde::Serialize;
use thiserror::Error;

use crate::model::{pathloss, ModelError, NetworkGeometry, TrafficModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid observation window: {0}")]
    Window(String),
    #[error("invalid sample size: {0}")]
    Samples(String),
    #[error("degenerate variance: all {n} samples identical")]
    DegenerateVariance { n: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Observation interval `[lo, hi]` on the road, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    lo: f64,
    hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SimError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SimError::Window(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Half-width `W = r₀ + u·tmax + 50/λ` beyond which vehicles are ignored.
pub fn reach(traffic: &TrafficModel, geom: &NetworkGeometry) -> f64 {
    geom.r0() + geom.u() * geom.tmax() + 50.0 / traffic.lambda()
}

/// `[−(W + ut), W]`: both slots see at least `W` of road on either side.
pub fn simulation_window(traffic: &TrafficModel, geom: &NetworkGeometry, t: f64) -> Result<Window, SimError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(SimError::Window(format!("time lag must be >= 0, got {t}")));
    }
    let w = reach(traffic, geom);
    Window::new(-(w + t * geom.u()), w)
}

/// Bound on the mean interference lost to vehicles beyond `W` on either
/// side, `2λ W^{1−η}/(η−1)`.
pub fn truncation_bias(traffic: &TrafficModel, geom: &NetworkGeometry) -> f64 {
    let eta = geom.eta();
    2.0 * traffic.lambda() * reach(traffic, geom).powf(1.0 - eta) / (eta - 1.0)
}

/// One realization of vehicle positions, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleConfiguration {
    pub positions: Vec<f64>,
    pub window: Window,
}

/// Stationary draw on `window`: the first vehicle sits at the equilibrium
/// forward-recurrence distance from `lo`, later gaps are `c + Exp(μ)`.
pub fn sample_configuration<R: Rng + ?Sized>(
    traffic: &TrafficModel,
    window: &Window,
    rng: &mut R,
) -> Result<VehicleConfiguration, SimError> {
    let min_len = 100.0 / traffic.lambda();
    if window.len() < min_len {
        return Err(SimError::Window(format!(
            "length {} shorter than 100/lambda = {min_len}",
            window.len()
        )));
    }
    let c = traffic.c();
    let free = Exp::new(traffic.mu()).map_err(|e| ModelError::Traffic(e.to_string()))?;
    let first = if rng.random::<f64>() < traffic.load() {
        c * rng.random::<f64>()
    } else {
        c + free.sample(rng)
    };
    let expected = (window.len() * traffic.lambda() * 1.2) as usize + 16;
    let mut positions = Vec::with_capacity(expected);
    let mut x = window.lo + first;
    while x <= window.hi {
        positions.push(x);
        x += c + free.sample(rng);
    }
    Ok(VehicleConfiguration {
        positions,
        window: *window,
    })
}

/// `Σ h_i g(x_i + shift)` with fading factors supplied by `fading`, called
/// once per vehicle outside the cell.
pub fn interference_with<F: FnMut() -> f64>(
    config: &VehicleConfiguration,
    shift: f64,
    geom: &NetworkGeometry,
    mut fading: F,
) -> f64 {
    config
        .positions
        .iter()
        .map(|&x| pathloss(x + shift, geom))
        .filter(|&g| g > 0.0)
        .map(|g| fading() * g)
        .sum()
}

/// Interference with fresh unit-mean exponential fading for every vehicle.
pub fn interference_at<R: Rng + ?Sized>(
    config: &VehicleConfiguration,
    shift: f64,
    geom: &NetworkGeometry,
    rng: &mut R,
) -> f64 {
    interference_with(config, shift, geom, || Exp1.sample(rng))
}

/// Interference at `τ` and `τ + t` on one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferencePair {
    pub i_tau: f64,
    pub i_tau_t: f64,
}

/// One configuration, observed at displacement 0 and `t·u` with independent
/// fading in the two slots.
pub fn sample_pair<R: Rng + ?Sized>(
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    t: f64,
    window: &Window,
    rng: &mut R,
) -> Result<InterferencePair, SimError> {
    displaced_pair(traffic, geom, t * geom.u(), window, rng)
}

fn displaced_pair<R: Rng + ?Sized>(
    traffic: &TrafficModel,
    geom: &NetworkGeometry,
    displacement: f64,
    window: &Window,
    rng: &mut R,
) -> Result<InterferencePair, SimError> {
    let config = sample_configuration(traffic, window, rng)?;
    Ok(InterferencePair {
        i_tau: interference_at(&config, 0.0, geom, rng),
        i_tau_t: interference_at(&config, displacement, geom, rng),
    })
}

/// RNG for draw `index` of a run: one ChaCha stream per index, so the
/// draws do not depend on how the run is split across threads.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
