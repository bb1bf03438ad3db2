use std::sync::Arc;

use super::{LogDensity, SupportBox, TargetModel};
use crate::error::{Error, Result};

/// Twisted Gaussian: `N(0, diag(100, 1, ..., 1))` composed with
/// `(x1, x2 + b*x1^2 - 100*b, x3, ...)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BananaSpec {
    pub b: f64,
    pub dim: usize,
}

#[derive(Debug)]
struct Banana {
    b: f64,
    dim: usize,
}

impl LogDensity for Banana {
    fn dim(&self) -> usize {
        self.dim
    }

    // Normalizing constant dropped.
    fn log_density(&self, x: &[f64]) -> f64 {
        let x1 = x[0];
        let twisted = x[1] + self.b * x1 * x1 - 100.0 * self.b;
        let tail: f64 = x[2..].iter().map(|v| v * v).sum();
        -x1 * x1 / 200.0 - 0.5 * twisted * twisted - 0.5 * tail
    }
}

/// Origin is the default start. `b = 0` is accepted and gives the
/// untwisted Gaussian; negative or non-finite `b` is rejected.
pub fn make_banana(spec: &BananaSpec, support: SupportBox) -> Result<TargetModel> {
    if spec.dim < 2 {
        return Err(Error::invalid(format!("banana target needs dim >= 2, got {}", spec.dim)));
    }
    if !(spec.b.is_finite() && spec.b >= 0.0) {
        return Err(Error::invalid(format!("banana nonlinearity must be non-negative, got {}", spec.b)));
    }
    TargetModel::new(
        format!("banana_{}d", spec.dim),
        Arc::new(Banana { b: spec.b, dim: spec.dim }),
        support,
        vec![0.0; spec.dim],
    )
}
