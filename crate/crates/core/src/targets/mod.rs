//! Target distributions as log-density evaluators with a compact support box.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

mod banana;
mod mixture;
mod vcm;

pub use banana::{make_banana, BananaSpec};
pub use mixture::{make_gaussian_mixture, GaussianMixtureSpec};
pub use vcm::{load_dyestuff, make_vcm, parse_dyestuff, VcmSpec, DYESTUFF};

pub type StateVector = Vec<f64>;

/// Half-width of the default support box on every coordinate.
pub const DEFAULT_SUPPORT: f64 = 1.0e6;

/// An unnormalized log-density on R^d.
///
/// Implementors return `-inf` outside their natural support. The support
/// box is applied by [`TargetModel`], not here.
pub trait LogDensity: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn log_density(&self, x: &[f64]) -> f64;

    /// Writes into `out[i]` the log-density of `x` with coordinate `k`
    /// replaced by `values[i]`.
    ///
    /// The default substitutes into a scratch copy. Targets whose density
    /// factorizes override this to reuse the terms that do not involve `k`.
    fn log_density_along(&self, x: &[f64], k: usize, values: &[f64], out: &mut [f64]) {
        let mut scratch = x.to_vec();
        for (v, o) in values.iter().zip(out.iter_mut()) {
            scratch[k] = *v;
            *o = self.log_density(&scratch);
        }
    }
}

/// Per-coordinate closed interval `[lower_k, upper_k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SupportBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::invalid("support box bounds must be non-empty and of equal length"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::invalid(format!("bad support interval [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[-half_width, half_width]^dim`.
    pub fn symmetric(dim: usize, half_width: f64) -> Result<Self> {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains_coordinate(&self, k: usize, value: f64) -> bool {
        value >= self.lower[k] && value <= self.upper[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(k, &v)| self.contains_coordinate(k, v))
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// A target distribution: density, support box and a default starting point.
#[derive(Clone, Debug)]
pub struct TargetModel {
    label: String,
    support: SupportBox,
    density: Arc<dyn LogDensity>,
    initial: StateVector,
}

impl TargetModel {
    /// Wraps any [`LogDensity`]. `initial` must lie in the box with finite
    /// density.
    pub fn new(
        label: impl Into<String>,
        density: Arc<dyn LogDensity>,
        support: SupportBox,
        initial: StateVector,
    ) -> Result<Self> {
        let dim = density.dim();
        if dim == 0 {
            return Err(Error::invalid("target dimension must be positive"));
        }
        if support.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: support.dim() });
        }
        let model = Self { label: label.into(), support, density, initial };
        model.check_initial(&model.initial)?;
        Ok(model)
    }

    pub fn with_initial(mut self, initial: StateVector) -> Result<Self> {
        self.check_initial(&initial)?;
        self.initial = initial;
        Ok(self)
    }

    fn check_initial(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        if !self.log_density(x).is_finite() {
            return Err(Error::invalid(format!(
                "initial state of target '{}' has zero density or lies outside the support box",
                self.label
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> &SupportBox {
        &self.support
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        if !self.support.contains(x) {
            return f64::NEG_INFINITY;
        }
        self.density.log_density(x)
    }

    /// Log-density of `x` with coordinate `k` set to `value`; `x` is untouched.
    pub fn log_density_with_coordinate(&self, x: &[f64], k: usize, value: f64) -> f64 {
        let mut out = [0.0];
        self.log_density_along(x, k, &[value], &mut out);
        out[0]
    }

    /// Batched form of [`Self::log_density_with_coordinate`]. Values outside
    /// the box on coordinate `k` get `-inf`; `x` is assumed to be in the box
    /// on every other coordinate.
    pub fn log_density_along(&self, x: &[f64], k: usize, values: &[f64], out: &mut [f64]) {
        debug_assert_eq!(values.len(), out.len());
        debug_assert!(k < self.dim());
        self.density.log_density_along(x, k, values, out);
        for (v, o) in values.iter().zip(out.iter_mut()) {
            if !self.support.contains_coordinate(k, *v) || o.is_nan() {
                *o = f64::NEG_INFINITY;
            }
        }
    }
}

/// The two-component, two-dimensional mixture used for the alpha study.
pub fn mixture2() -> GaussianMixtureSpec {
    GaussianMixtureSpec {
        weights: vec![0.5, 0.5],
        means: vec![vec![5.0, 0.0], vec![15.0, 0.0]],
        variances: vec![vec![6.25, 6.25], vec![6.25, 0.25]],
    }
}

/// Four-dimensional two-component mixture whose third coordinate narrows
/// near the second mode.
pub fn mixture4() -> GaussianMixtureSpec {
    GaussianMixtureSpec {
        weights: vec![0.5, 0.5],
        means: vec![vec![5.0, 5.0, 0.0, 0.0], vec![15.0, 15.0, 0.0, 0.0]],
        variances: vec![vec![6.25, 6.25, 6.25, 0.01], vec![6.25, 6.25, 0.25, 0.01]],
    }
}

/// Twenty-dimensional two-component mixture.
pub fn mixture20() -> GaussianMixtureSpec {
    let mu1 = [5., 5., 0., 0., 0., 0., 10., 15., 0., 0., 5., 5., 0., 0., 0., 0., 10., 15., 0., 0.];
    let mu2 = [10., 10., 0., 0., 0., 0., 7., 20., 0., 0., 10., 10., 0., 0., 0., 0., 7., 20., 0., 0.];
    let v1 = [
        16.00, 16.00, 0.25, 4.00, 1.00, 0.01, 9.00, 16.00, 9.00, 0.01, 16.00, 16.00, 0.25, 4.00, 1.00, 0.01, 9.00,
        16.00, 9.00, 0.01,
    ];
    let v2 = [
        16.00, 16.00, 6.25, 4.00, 1.00, 4.41, 9.00, 16.00, 0.25, 0.01, 16.00, 16.00, 6.25, 4.00, 1.00, 4.41, 9.00,
        16.00, 0.25, 0.01,
    ];
    GaussianMixtureSpec {
        weights: vec![0.5, 0.5],
        means: vec![mu1.to_vec(), mu2.to_vec()],
        variances: vec![v1.to_vec(), v2.to_vec()],
    }
}
