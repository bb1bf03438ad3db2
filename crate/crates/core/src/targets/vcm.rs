use std::path::Path;
use std::sync::Arc;

use super::{LogDensity, SupportBox, TargetModel};
use crate::error::{Error, Result};

/// Dyestuff yields in grams: six batches of five samples.
pub const DYESTUFF: [[f64; 5]; 6] = [
    [1545.0, 1440.0, 1440.0, 1520.0, 1580.0],
    [1540.0, 1555.0, 1490.0, 1560.0, 1495.0],
    [1595.0, 1550.0, 1605.0, 1510.0, 1560.0],
    [1445.0, 1440.0, 1595.0, 1465.0, 1545.0],
    [1595.0, 1630.0, 1515.0, 1635.0, 1625.0],
    [1520.0, 1455.0, 1450.0, 1480.0, 1445.0],
];

/// Variance components model: `y_ij ~ N(theta_i, s2e)`,
/// `theta_i ~ N(mu, s2t)`, `s2t ~ IG(a1, b1)`, `s2e ~ IG(a2, b2)`,
/// `mu ~ N(mu0, sigma0_sq)`.
///
/// Parameter layout is `(s2t, s2e, mu, theta_1, ..., theta_K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VcmSpec {
    pub data: Vec<Vec<f64>>,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub mu0: f64,
    pub sigma0_sq: f64,
}

impl VcmSpec {
    /// Dyestuff data with concentrated inverse-gamma priors.
    pub fn dyestuff() -> Self {
        Self {
            data: DYESTUFF.iter().map(|r| r.to_vec()).collect(),
            a1: 300.0,
            b1: 1000.0,
            a2: 300.0,
            b2: 1000.0,
            mu0: 0.0,
            sigma0_sq: 1.0e10,
        }
    }

    pub fn dim(&self) -> usize {
        3 + self.data.len()
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in
            [("a1", self.a1), ("b1", self.b1), ("a2", self.a2), ("b2", self.b2), ("sigma0_sq", self.sigma0_sq)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("vcm hyperparameter {name} must be positive, got {v}")));
            }
        }
        if !self.mu0.is_finite() {
            return Err(Error::invalid("vcm mu0 must be finite"));
        }
        let cols = self.data.first().map_or(0, Vec::len);
        if cols == 0 || self.data.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("vcm data must be a non-empty rectangular matrix"));
        }
        if self.data.iter().flatten().any(|y| !y.is_finite()) {
            return Err(Error::invalid("vcm data must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Vcm {
    spec: VcmSpec,
}

impl LogDensity for Vcm {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let s = &self.spec;
        let (s2t, s2e, mu) = (x[0], x[1], x[2]);
        if !(s2t > 0.0 && s2e > 0.0) {
            return f64::NEG_INFINITY;
        }
        let thetas = &x[3..];
        let (ln_t, ln_e) = (s2t.ln(), s2e.ln());
        let mut lp = -(s.a1 + 1.0) * ln_t
            - s.b1 / s2t
            - (s.a2 + 1.0) * ln_e
            - s.b2 / s2e
            - (mu - s.mu0).powi(2) / (2.0 * s.sigma0_sq);
        let k = thetas.len() as f64;
        lp -= thetas.iter().map(|t| (t - mu).powi(2)).sum::<f64>() / (2.0 * s2t) + 0.5 * k * ln_t;
        let mut sse = 0.0;
        let mut n = 0usize;
        for (row, theta) in s.data.iter().zip(thetas) {
            sse += row.iter().map(|y| (y - theta).powi(2)).sum::<f64>();
            n += row.len();
        }
        lp - sse / (2.0 * s2e) - 0.5 * n as f64 * ln_e
    }
}

/// Starts at the prior modes of the variances, the grand mean and the
/// batch means.
pub fn make_vcm(spec: &VcmSpec, support: SupportBox) -> Result<TargetModel> {
    spec.validate()?;
    let batch_means: Vec<f64> = spec.data.iter().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect();
    let cells: usize = spec.data.iter().map(Vec::len).sum();
    let grand = spec.data.iter().flatten().sum::<f64>() / cells as f64;
    let mut initial = vec![spec.b1 / (spec.a1 + 1.0), spec.b2 / (spec.a2 + 1.0), grand];
    initial.extend(batch_means);
    TargetModel::new("vcm", Arc::new(Vcm { spec: spec.clone() }), support, initial)
}

/// Parses whitespace-separated rows of numbers.
pub fn parse_dyestuff(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::invalid(format!("line {}: '{tok}' is not a number", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::invalid("data file must hold a non-empty rectangular table"));
    }
    Ok(rows)
}

pub fn load_dyestuff(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_dyestuff(&std::fs::read_to_string(path)?)
}
