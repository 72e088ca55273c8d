use serde::Serialize;

use super::{sample_configuration, stream_rng, SimError, Window};
use crate::model::TrafficModel;

/// Empirical pair density on bins `[k·width, (k+1)·width)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairHistogram {
    pub width: f64,
    pub n_realizations: u64,
    /// Ordered pairs per bin, summed over realizations.
    pub counts: Vec<u64>,
    /// Estimated `ρ⁽²⁾` averaged over each bin, vehicles²/m².
    pub density: Vec<f64>,
    /// Standard error of `density` from the spread across realizations.
    pub stderr: Vec<f64>,
}

impl PairHistogram {
    pub fn bin_lo(&self, k: usize) -> f64 {
        k as f64 * self.width
    }

    pub fn bin_mid(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.width
    }
}

/// Pair-distance histogram of `n_realizations` stationary configurations.
///
/// Only vehicles at least `bins·width` inside the window act as the first
/// member of a pair, so every partner within range is observed and the
/// count is free of edge loss. Both orders of each pair are counted.
pub fn pair_distance_histogram(
    traffic: &TrafficModel,
    window: &Window,
    n_realizations: u64,
    bins: usize,
    width: f64,
    seed: u64,
) -> Result<PairHistogram, SimError> {
    if !(width.is_finite() && width > 0.0) || bins == 0 {
        return Err(SimError::Window(format!("need bins >= 1 and width > 0, got {bins} x {width}")));
    }
    if n_realizations < 2 {
        return Err(SimError::Samples(format!("need at least 2 realizations, got {n_realizations}")));
    }
    let range = bins as f64 * width;
    let (lo, hi) = (window.lo() + range, window.hi() - range);
    if !(hi > lo) {
        return Err(SimError::Window(format!("window too short for a pair range of {range} m")));
    }
    let mut counts = vec![0u64; bins];
    let mut sum_sq = vec![0f64; bins];
    let mut local = vec![0u64; bins];
    for r in 0..n_realizations {
        let cfg = sample_configuration(traffic, window, &mut stream_rng(seed, r))?;
        let xs = &cfg.positions;
        local.iter_mut().for_each(|c| *c = 0);
        for (i, &x) in xs.iter().enumerate() {
            if x < lo || x > hi {
                continue;
            }
            let ahead = xs[i + 1..].iter().map(|&y| y - x).take_while(|&d| d < range);
            let behind = xs[..i].iter().rev().map(|&y| x - y).take_while(|&d| d < range);
            for d in ahead.chain(behind) {
                local[((d / width) as usize).min(bins - 1)] += 1;
            }
        }
        for k in 0..bins {
            counts[k] += local[k];
            sum_sq[k] += (local[k] as f64).powi(2);
        }
    }
    let n = n_realizations as f64;
    // E[count] = 2 |A| ∫_bin ρ⁽²⁾, with |A| the reference length
    let norm = 2.0 * (hi - lo) * width;
    let density = counts.iter().map(|&c| c as f64 / n / norm).collect();
    let stderr = counts
        .iter()
        .zip(&sum_sq)
        .map(|(&c, &s)| {
            let mean = c as f64 / n;
            let var = (s / n - mean * mean) * n / (n - 1.0);
            (var.max(0.0) / n).sqrt() / norm
        })
        .collect();
    Ok(PairHistogram {
        width,
        n_realizations,
        counts,
        density,
        stderr,
    })
}
