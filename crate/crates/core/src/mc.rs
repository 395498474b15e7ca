//! Monte Carlo estimates and their streaming accumulation.

use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl MCEstimate {
    /// Estimate that carries no sampling noise.
    pub fn exact(value: f64, n_samples: usize) -> Self {
        Self { value, stderr: 0.0, n_samples }
    }

    /// `|value - target| / stderr`, or 0/inf when the estimate is exact.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { value: self.value * s, stderr: self.stderr * s.abs(), n_samples: self.n_samples }
    }
}

/// Welford running mean and variance; chunks merge with the pairwise rule.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self) -> MCEstimate {
        let stderr = if self.n < 2 { 0.0 } else { (self.variance() / self.n as f64).sqrt() };
        MCEstimate { value: self.mean, stderr, n_samples: self.n }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Merges per-chunk accumulators in order.
pub fn combine<'a, I: IntoIterator<Item = &'a Accumulator>>(parts: I) -> Accumulator {
    let mut acc = Accumulator::new();
    for p in parts {
        acc.merge(p);
    }
    acc
}
