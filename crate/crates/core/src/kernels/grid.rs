use crate::error::{Error, Result};

/// Bounds `[epsilon, upper]` every proposal scale is kept inside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleBounds {
    pub epsilon: f64,
    pub upper: f64,
}

impl ScaleBounds {
    pub fn new(epsilon: f64, upper: f64) -> Result<Self> {
        if !(epsilon.is_finite() && upper.is_finite() && epsilon > 0.0 && epsilon < upper) {
            return Err(Error::invalid(format!("scale bounds need 0 < epsilon < upper, got [{epsilon}, {upper}]")));
        }
        Ok(Self { epsilon, upper })
    }

    pub fn clamp(&self, sigma: f64) -> f64 {
        sigma.clamp(self.epsilon, self.upper)
    }

    pub fn contains(&self, sigma: f64) -> bool {
        sigma >= self.epsilon && sigma <= self.upper
    }
}

impl Default for ScaleBounds {
    /// `[2^-20, 2^20]`.
    fn default() -> Self {
        Self { epsilon: (-20f64).exp2(), upper: 20f64.exp2() }
    }
}

/// `d x m` proposal standard deviations, each row strictly ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleGrid {
    m: usize,
    sigma: Vec<f64>,
}

impl ScaleGrid {
    /// Builds a grid from rows, sorting each row and nudging duplicates
    /// upward by a factor of `1 + 1e-9` per repeat.
    pub fn from_rows(rows: Vec<Vec<f64>>, bounds: ScaleBounds) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || m == 0 {
            return Err(Error::invalid("scale grid needs at least one row and one column"));
        }
        let mut sigma = Vec::with_capacity(rows.len() * m);
        for (k, mut row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!("scale grid row {k} has {} entries, expected {m}", row.len())));
            }
            if let Some(bad) = row.iter().find(|s| !bounds.contains(**s)) {
                return Err(Error::invalid(format!(
                    "scale {bad} in row {k} lies outside [{}, {}]",
                    bounds.epsilon, bounds.upper
                )));
            }
            row.sort_by(f64::total_cmp);
            for j in 1..m {
                if row[j] <= row[j - 1] {
                    row[j] = row[j - 1] * (1.0 + 1e-9);
                }
            }
            if row[m - 1] > bounds.upper {
                return Err(Error::invalid(format!(
                    "row {k} cannot be made strictly ascending below {}",
                    bounds.upper
                )));
            }
            sigma.extend(row);
        }
        Ok(Self { m, sigma })
    }

    /// The same row for every coordinate.
    pub fn uniform(d: usize, row: &[f64], bounds: ScaleBounds) -> Result<Self> {
        Self::from_rows(vec![row.to_vec(); d], bounds)
    }

    /// `sigma_j = 2^(j - 1 - floor(m/2))` for `j = 1..m` on every coordinate.
    pub fn generic(d: usize, m: usize, bounds: ScaleBounds) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("generic grid needs m >= 1"));
        }
        let half = (m / 2) as i32;
        let row: Vec<f64> = (0..m as i32).map(|j| f64::from(j - half).exp2()).collect();
        Self::uniform(d, &row, bounds)
    }

    pub fn dim(&self) -> usize {
        self.sigma.len() / self.m
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.sigma[k * self.m..(k + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.sigma.chunks(self.m)
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.sigma[k * self.m + j]
    }

    /// Replaces row `k`. Callers keep the ascending invariant.
    pub(crate) fn set_row(&mut self, k: usize, row: &[f64]) {
        debug_assert_eq!(row.len(), self.m);
        self.sigma[k * self.m..(k + 1) * self.m].copy_from_slice(row);
    }

    pub fn within(&self, bounds: ScaleBounds) -> bool {
        self.sigma.iter().all(|s| bounds.contains(*s))
    }
}
