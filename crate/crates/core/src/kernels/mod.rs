//! Component-wise transition kernels driven by a per-coordinate scale grid.

mod cmh;
mod cmtm;
mod grid;

pub use cmh::{cmh_coordinate_update, cmh_sweep, mixture_cmh_sweep};
pub use cmtm::{cmtm_coordinate_update, cmtm_log_weight, cmtm_sweep};
pub use grid::{ScaleBounds, ScaleGrid};

use crate::error::{Error, Result};
use crate::targets::StateVector;

/// Distance exponent used when none is configured.
pub const DEFAULT_ALPHA: f64 = 2.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    alpha: f64,
}

impl KernelConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be positive and finite, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { alpha: DEFAULT_ALPHA }
    }
}

/// Outcome of one coordinate update.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateUpdateRecord {
    pub coordinate: usize,
    /// Index of the chosen proposal; `None` when no candidate had positive weight.
    pub selected: Option<usize>,
    pub accepted: bool,
    /// `|x'_k - x_k|`, zero on rejection.
    pub jump: f64,
    /// Probability with which the selected candidate was accepted.
    pub acceptance_prob: f64,
}

impl CoordinateUpdateRecord {
    pub(crate) fn no_selection(coordinate: usize) -> Self {
        Self { coordinate, selected: None, accepted: false, jump: 0.0, acceptance_prob: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub updates: Vec<CoordinateUpdateRecord>,
    pub state_after: StateVector,
}

impl SweepRecord {
    pub fn accepted_count(&self) -> usize {
        self.updates.iter().filter(|u| u.accepted).count()
    }
}

/// Accept/reject with one uniform: accept iff `u < exp(log_prob)`.
pub(crate) fn accept(log_prob: f64, u: f64) -> bool {
    log_prob >= 0.0 || u < log_prob.exp()
}
