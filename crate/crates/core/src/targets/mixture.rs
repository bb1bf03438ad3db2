use std::f64::consts::PI;
use std::sync::Arc;

use super::{LogDensity, SupportBox, TargetModel};
use crate::error::{Error, Result};
use crate::rng::log_sum_exp;

/// Finite mixture of diagonal-covariance Gaussians.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixtureSpec {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

impl GaussianMixtureSpec {
    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.weights.len();
        if c == 0 {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        if self.means.len() != c || self.variances.len() != c {
            return Err(Error::invalid("mixture weights, means and variances disagree on component count"));
        }
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("mixture dimension must be positive"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("mixture weights must be positive"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
        }
        for (m, v) in self.means.iter().zip(&self.variances) {
            if m.len() != d || v.len() != d {
                return Err(Error::invalid("every mean and variance vector must have the same length"));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("mixture means must be finite"));
            }
            if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::invalid("mixture variances must be strictly positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Component {
    log_weight: f64,
    mean: Vec<f64>,
    inv_two_var: Vec<f64>,
    log_norm: Vec<f64>,
}

impl Component {
    fn term(&self, k: usize, x: f64) -> f64 {
        let dx = x - self.mean[k];
        self.log_norm[k] - dx * dx * self.inv_two_var[k]
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.log_weight + (0..x.len()).map(|k| self.term(k, x[k])).sum::<f64>()
    }
}

#[derive(Debug)]
struct GaussianMixture {
    dim: usize,
    components: Vec<Component>,
}

impl LogDensity for GaussianMixture {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let parts: Vec<f64> = self.components.iter().map(|c| c.log_density(x)).collect();
        log_sum_exp(&parts)
    }

    fn log_density_along(&self, x: &[f64], k: usize, values: &[f64], out: &mut [f64]) {
        let rest: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.log_weight + (0..self.dim).filter(|&i| i != k).map(|i| c.term(i, x[i])).sum::<f64>())
            .collect();
        let mut parts = vec![0.0; self.components.len()];
        for (v, o) in values.iter().zip(out.iter_mut()) {
            for ((p, c), r) in parts.iter_mut().zip(&self.components).zip(&rest) {
                *p = r + c.term(k, *v);
            }
            *o = log_sum_exp(&parts);
        }
    }
}

/// Normalized mixture density; starts at the first component's mean.
pub fn make_gaussian_mixture(spec: &GaussianMixtureSpec, support: SupportBox) -> Result<TargetModel> {
    spec.validate()?;
    let components = spec
        .weights
        .iter()
        .zip(&spec.means)
        .zip(&spec.variances)
        .map(|((w, m), v)| Component {
            log_weight: w.ln(),
            mean: m.clone(),
            inv_two_var: v.iter().map(|s| 0.5 / s).collect(),
            log_norm: v.iter().map(|s| -0.5 * (2.0 * PI * s).ln()).collect(),
        })
        .collect();
    let density = GaussianMixture { dim: spec.dim(), components };
    TargetModel::new(format!("gaussian_mixture_{}d", spec.dim()), Arc::new(density), support, spec.means[0].clone())
}
