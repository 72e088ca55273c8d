use rayon::prelude::*;
use serde::Serialize;

use super::{displaced_pair, simulation_window, stream_rng, truncation_bias, CoMoments, SimError, Window};
use crate::model::{NetworkGeometry, TrafficModel};

/// Contiguous sample blocks used for the jackknife, fixed so the estimate
/// does not depend on the thread count.
pub const JACKKNIFE_BLOCKS: usize = 20;

const MIN_SAMPLES: u64 = 1_000;

/// Run settings for [`MonteCarlo::estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub n_samples: u64,
    pub seed: u64,
    /// Worker threads; has no effect on the numbers produced.
    pub n_partitions: usize,
}

/// Sample moments of the interference at two slots `t` apart.
///
/// Mean and variance pool both slots; `rho = covariance / variance`.
/// Standard errors are leave-one-block-out jackknife estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub t: f64,
    pub n: u64,
    pub mean: f64,
    pub mean_tau: f64,
    pub mean_tau_t: f64,
    pub variance: f64,
    pub covariance: f64,
    pub rho: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub se_covariance: f64,
    pub se_rho: f64,
    /// Upper bound on the mean interference missed beyond the window.
    pub truncation_bias: f64,
}

impl CorrelationEstimate {
    /// `E{I(τ) I(τ+t)}`
    pub fn mean_product(&self) -> f64 {
        self.covariance + self.mean_tau * self.mean_tau_t
    }
}

impl MonteCarlo {
    pub fn new(n_samples: u64, seed: u64, n_partitions: usize) -> Result<Self, SimError> {
        if n_samples < MIN_SAMPLES {
            return Err(SimError::Samples(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
        }
        if n_partitions == 0 {
            return Err(SimError::Samples("n_partitions must be >= 1".into()));
        }
        Ok(MonteCarlo {
            n_samples,
            seed,
            n_partitions,
        })
    }

    /// Correlation estimate at lag `t` (any `t ≥ 0`), vehicles moving right.
    pub fn estimate(&self, traffic: &TrafficModel, geom: &NetworkGeometry, t: f64) -> Result<CorrelationEstimate, SimError> {
        let window = simulation_window(traffic, geom, t)?;
        self.run(traffic, geom, t, t * geom.u(), &window)
    }

    #[cfg(test)]
    /// Same draw with the road mirrored: vehicles move left, window
    /// `[−W, W + ut]`.
    fn estimate_mirrored(&self, traffic: &TrafficModel, geom: &NetworkGeometry, t: f64) -> Result<CorrelationEstimate, SimError> {
        let w = super::reach(traffic, geom);
        let window = Window::new(-w, w + t * geom.u())?;
        self.run(traffic, geom, t, -t * geom.u(), &window)
    }

    fn run(
        &self,
        traffic: &TrafficModel,
        geom: &NetworkGeometry,
        t: f64,
        displacement: f64,
        window: &Window,
    ) -> Result<CorrelationEstimate, SimError> {
        MonteCarlo::new(self.n_samples, self.seed, self.n_partitions)?;
        let n = self.n_samples;
        let bounds: Vec<(u64, u64)> = (0..JACKKNIFE_BLOCKS as u64)
            .map(|k| (k * n / JACKKNIFE_BLOCKS as u64, (k + 1) * n / JACKKNIFE_BLOCKS as u64))
            .collect();
        let block = |&(lo, hi): &(u64, u64)| -> Result<CoMoments, SimError> {
            let mut acc = CoMoments::new();
            for i in lo..hi {
                let mut rng = stream_rng(self.seed, i);
                let p = displaced_pair(traffic, geom, displacement, window, &mut rng)?;
                acc.push(p.i_tau, p.i_tau_t);
            }
            Ok(acc)
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.n_partitions)
            .build()
            .map_err(|e| SimError::Samples(e.to_string()))?;
        let blocks: Vec<CoMoments> = pool.install(|| bounds.par_iter().map(block).collect::<Result<_, _>>())?;

        let total = merge_except(&blocks, None);
        let variance = total.pooled_variance();
        if !(variance > 0.0) {
            return Err(SimError::DegenerateVariance { n });
        }
        let leave_out: Vec<CoMoments> = (0..blocks.len()).map(|k| merge_except(&blocks, Some(k))).collect();
        let se = |stat: fn(&CoMoments) -> f64| jackknife_se(leave_out.iter().map(stat));
        Ok(CorrelationEstimate {
            t,
            n,
            mean: total.pooled_mean(),
            mean_tau: total.mean_x(),
            mean_tau_t: total.mean_y(),
            variance,
            covariance: total.covariance(),
            rho: total.correlation(),
            se_mean: se(CoMoments::pooled_mean),
            se_variance: se(CoMoments::pooled_variance),
            se_covariance: se(CoMoments::covariance),
            se_rho: se(CoMoments::correlation),
            truncation_bias: truncation_bias(traffic, geom),
        })
    }
}

/// Merges blocks in index order, skipping `skip`.
fn merge_except(blocks: &[CoMoments], skip: Option<usize>) -> CoMoments {
    let mut acc = CoMoments::new();
    for (k, b) in blocks.iter().enumerate() {
        if Some(k) != skip {
            acc.merge(b);
        }
    }
    acc
}

fn jackknife_se(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let g = v.len() as f64;
    let mean = v.iter().sum::<f64>() / g;
    ((g - 1.0) / g * v.iter().map(|x| (x - mean).powi(2)).sum::<f64>()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{j_term, rho_ppp};
    use crate::model::mean_interference;

    fn geom() -> NetworkGeometry {
        NetworkGeometry::new(150.0, 3.0, 10.0).unwrap()
    }

    #[test]
    fn rejects_small_runs() {
        assert!(MonteCarlo::new(999, 0, 1).is_err());
        assert!(MonteCarlo::new(1000, 0, 0).is_err());
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let a = MonteCarlo::new(4_000, 17, 1).unwrap().estimate(&t, &geom(), 5.0).unwrap();
        let b = MonteCarlo::new(4_000, 17, 8).unwrap().estimate(&t, &geom(), 5.0).unwrap();
        assert_eq!(a, b);
        let c = MonteCarlo::new(4_000, 18, 8).unwrap().estimate(&t, &geom(), 5.0).unwrap();
        assert_ne!(a.rho, c.rho);
    }

    #[test]
    fn mean_matches_campbell() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let e = MonteCarlo::new(100_000, 1, 8).unwrap().estimate(&t, &geom(), 10.0).unwrap();
        let m = mean_interference(&t, &geom());
        // vehicles beyond the window only ever remove interference
        let deficit = m - e.mean;
        assert!(deficit > -3.0 * e.se_mean && deficit < e.truncation_bias + 3.0 * e.se_mean, "{} vs {m} (se {})", e.mean, e.se_mean);
        assert!(e.rho.abs() <= 1.0 + 1e-9);
    }

    #[test]
    fn poisson_product_moment_matches_pair_terms() {
        // with c = 0 the pair term is exactly E{I}², so E{I I_t} = J + E{I}²
        let t = TrafficModel::poisson(0.05).unwrap();
        let e = MonteCarlo::new(100_000, 2, 8).unwrap().estimate(&t, &geom(), 5.0).unwrap();
        let m = mean_interference(&t, &geom());
        let expected = j_term(5.0, &t, &geom()).unwrap() + m * m;
        // the product's error is dominated by the covariance and the means
        let se = (e.se_covariance.powi(2) + (2.0 * m * e.se_mean).powi(2)).sqrt();
        assert!((e.mean_product() - expected).abs() < 3.0 * se + 2.0 * m * e.truncation_bias);
    }

    #[test]
    fn fading_halves_zero_lag_correlation() {
        let t = TrafficModel::poisson(0.05).unwrap();
        let e = MonteCarlo::new(100_000, 3, 8).unwrap().estimate(&t, &geom(), 0.0).unwrap();
        assert!((0.45..=0.55).contains(&e.rho), "{}", e.rho);
        assert!((e.rho - rho_ppp(0.0, &geom()).unwrap()).abs() < 3.0 * e.se_rho + 1e-3);
    }

    #[test]
    fn mirrored_road_gives_same_covariance() {
        let t = TrafficModel::new(0.05, 4.0).unwrap();
        let mc = MonteCarlo::new(50_000, 4, 8).unwrap();
        let a = mc.estimate(&t, &geom(), 8.0).unwrap();
        let b = MonteCarlo { seed: 5, ..mc }.estimate_mirrored(&t, &geom(), 8.0).unwrap();
        let se = (a.se_covariance.powi(2) + b.se_covariance.powi(2)).sqrt();
        assert!((a.covariance - b.covariance).abs() < 3.0 * se);
    }
}
