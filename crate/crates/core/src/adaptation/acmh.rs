use crate::error::{Error, Result};
use crate::kernels::{ScaleBounds, SweepRecord};

/// Acceptance rate the single-proposal controller steers each coordinate to.
pub const ACMH_TARGET_RATE: f64 = 0.44;

/// Step on `log sigma` after batch `a`: `min(0.05, a^(-1/2))`.
pub fn acmh_step_size(a: u64) -> f64 {
    0.05f64.min((a.max(1) as f64).sqrt().recip())
}

/// Batch acceptance-rate controller for component-wise Metropolis.
///
/// After every `batch_size` sweeps each coordinate's `log sigma` moves up by
/// the step size if its batch acceptance rate exceeded the target and down
/// otherwise (a rate exactly on target moves down).
#[derive(Clone, Debug)]
pub struct AcmhState {
    accepted: Vec<u64>,
    sweeps: u64,
    batch_size: u64,
    batch_index: u64,
    target_rate: f64,
    bounds: ScaleBounds,
}

impl AcmhState {
    pub fn new(d: usize, batch_size: u64, bounds: ScaleBounds) -> Result<Self> {
        if d == 0 || batch_size == 0 {
            return Err(Error::invalid("acmh needs d >= 1 and batch_size >= 1"));
        }
        Ok(Self { accepted: vec![0; d], sweeps: 0, batch_size, batch_index: 0, target_rate: ACMH_TARGET_RATE, bounds })
    }

    pub fn batch_index(&self) -> u64 {
        self.batch_index
    }

    /// One update of `scales` from batch acceptance `rates`.
    pub fn update(&mut self, scales: &mut [f64], rates: &[f64]) -> Result<()> {
        if scales.len() != rates.len() {
            return Err(Error::DimensionMismatch { expected: scales.len(), found: rates.len() });
        }
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::invalid("acceptance rates must lie in [0, 1]"));
        }
        self.batch_index += 1;
        let delta = acmh_step_size(self.batch_index);
        for (s, r) in scales.iter_mut().zip(rates) {
            let step = if *r > self.target_rate { delta } else { -delta };
            *s = self.bounds.clamp((s.ln() + step).exp());
        }
        Ok(())
    }

    /// Accumulates a sweep and updates `scales` when a batch completes.
    pub fn observe(&mut self, record: &SweepRecord, scales: &mut [f64]) -> Result<bool> {
        if record.updates.len() != self.accepted.len() {
            return Err(Error::DimensionMismatch { expected: self.accepted.len(), found: record.updates.len() });
        }
        for u in &record.updates {
            self.accepted[u.coordinate] += u64::from(u.accepted);
        }
        self.sweeps += 1;
        if self.sweeps < self.batch_size {
            return Ok(false);
        }
        let rates: Vec<f64> = self.accepted.iter().map(|&a| a as f64 / self.sweeps as f64).collect();
        self.update(scales, &rates)?;
        self.accepted.iter_mut().for_each(|a| *a = 0);
        self.sweeps = 0;
        Ok(true)
    }
}
