//! Seedable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the 64-bit seed and
//! positioned on the ChaCha stream selected by `stream_id`, so two streams
//! with the same seed and different ids never overlap and need no
//! coordination. Normal variates come from the ziggurat sampler in
//! `rand_distr`; its draw consumption depends only on the underlying bits,
//! so a replayed stream reproduces every variate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// `mean + sigma * Z`. A zero `sigma` still consumes one variate so
    /// draw counts do not depend on the parameters.
    pub fn normal(&mut self, mean: f64, sigma: f64) -> Result<f64> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::invalid(format!("normal sigma must be finite and non-negative, got {sigma}")));
        }
        let z = self.standard_normal();
        if sigma == 0.0 {
            return Ok(mean);
        }
        Ok(mean + sigma * z)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Draws an index with probability proportional to `exp(logw[j])`.
    ///
    /// Always consumes exactly one uniform. Entries may be `-inf`; at least
    /// one must be finite.
    pub fn categorical_logweights(&mut self, logw: &[f64]) -> Result<usize> {
        let u = self.uniform();
        select_by_logweights(logw, u)
    }
}

pub fn make_stream(seed: u64, stream_id: u64) -> RngStream {
    RngStream::new(seed, stream_id)
}

pub fn draw_normal(rng: &mut RngStream, mean: f64, sigma: f64) -> Result<f64> {
    rng.normal(mean, sigma)
}

pub fn draw_categorical_logweights(rng: &mut RngStream, logw: &[f64]) -> Result<usize> {
    rng.categorical_logweights(logw)
}

/// `log(sum(exp(v)))` with max subtraction; `-inf` when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Inverse-CDF selection on max-shifted weights, driven by a single uniform.
fn select_by_logweights(logw: &[f64], u: f64) -> Result<usize> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || logw.is_empty() {
        return Err(Error::NoSelectableCandidate);
    }
    if max.is_nan() || logw.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::invalid("log-weights must be finite or -inf"));
    }
    let total: f64 = logw.iter().map(|&w| (w - max).exp()).sum();
    let threshold = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &w) in logw.iter().enumerate() {
        let p = (w - max).exp();
        if p > 0.0 {
            acc += p;
            last_positive = j;
            if threshold < acc {
                return Ok(j);
            }
        }
    }
    // Roundoff can leave `threshold` marginally above the accumulated sum.
    Ok(last_positive)
}
