use serde::Serialize;

/// Streaming first and second co-moments of `(x, y)` pairs.
///
/// Updates follow Welford; merges follow Chan et al., so blocks accumulated
/// separately combine without a second pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CoMoments {
    n: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl CoMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    pub fn merge(&mut self, other: &CoMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let dx = other.mean_x - self.mean_x;
        let dy = other.mean_y - self.mean_y;
        let w = na * nb / n;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        self.m2_x += other.m2_x + dx * dx * w;
        self.m2_y += other.m2_y + dy * dy * w;
        self.c_xy += other.c_xy + dx * dy * w;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    /// Unbiased sample variances and covariance; NaN below two samples.
    pub fn var_x(&self) -> f64 {
        self.m2_x / (self.n as f64 - 1.0)
    }

    pub fn var_y(&self) -> f64 {
        self.m2_y / (self.n as f64 - 1.0)
    }

    pub fn covariance(&self) -> f64 {
        self.c_xy / (self.n as f64 - 1.0)
    }

    /// Mean over both coordinates, for a stationary pair.
    pub fn pooled_mean(&self) -> f64 {
        0.5 * (self.mean_x + self.mean_y)
    }

    pub fn pooled_variance(&self) -> f64 {
        0.5 * (self.var_x() + self.var_y())
    }

    /// `covariance / pooled_variance`; at most 1 in magnitude since the
    /// geometric mean of the two variances never exceeds their average.
    pub fn correlation(&self) -> f64 {
        self.covariance() / self.pooled_variance()
    }
}

impl FromIterator<(f64, f64)> for CoMoments {
    fn from_iter<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        let mut acc = CoMoments::new();
        for (x, y) in iter {
            acc.push(x, y);
        }
        acc
    }
}
