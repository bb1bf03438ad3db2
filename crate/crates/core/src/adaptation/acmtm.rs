use std::fmt;

use super::{adaptation_probability, respace_log2};
use crate::error::{Error, Result};
use crate::kernels::{ScaleBounds, ScaleGrid, SweepRecord};
use crate::rng::RngStream;

/// Sweeps between adaptation attempts.
pub const DEFAULT_BETA: u64 = 100;

/// Which end point moved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    DoubleMax,
    HalveMax,
    HalveMin,
    DoubleMin,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::DoubleMax => "double_max",
            Branch::HalveMax => "halve_max",
            Branch::HalveMin => "halve_min",
            Branch::DoubleMin => "double_min",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptationEvent {
    pub iteration: u64,
    pub coordinate: usize,
    pub branch: Branch,
    pub sigma_min_old: f64,
    pub sigma_min_new: f64,
    pub sigma_max_old: f64,
    pub sigma_max_new: f64,
}

/// Selection-frequency controller for a multiple-try scale grid.
///
/// Owns its own random stream for the adapt/skip coin so that kernel draws
/// are identical with and without adaptation.
#[derive(Clone, Debug)]
pub struct AdaptationState {
    d: usize,
    m: usize,
    counts: Vec<u64>,
    updates: u64,
    attempt: u64,
    probability: f64,
    beta: u64,
    bounds: ScaleBounds,
    coin: RngStream,
    events: Vec<AdaptationEvent>,
}

impl AdaptationState {
    pub fn new(d: usize, m: usize, beta: u64, bounds: ScaleBounds, coin: RngStream) -> Result<Self> {
        if d == 0 || m == 0 || beta == 0 {
            return Err(Error::invalid("adaptation needs d, m and beta all >= 1"));
        }
        Ok(Self {
            d,
            m,
            counts: vec![0; d * m],
            updates: 0,
            attempt: 0,
            probability: 1.0,
            beta,
            bounds,
            coin,
            events: Vec::new(),
        })
    }

    pub fn selection_counts(&self, k: usize) -> &[u64] {
        &self.counts[k * self.m..(k + 1) * self.m]
    }

    pub fn updates_per_coordinate(&self) -> u64 {
        self.updates
    }

    /// Number of attempts made so far.
    pub fn attempt_index(&self) -> u64 {
        self.attempt
    }

    /// Probability the next attempt adapts.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn bounds(&self) -> ScaleBounds {
        self.bounds
    }

    pub fn events(&self) -> &[AdaptationEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<AdaptationEvent> {
        self.events
    }

    /// Counts the selected proposal of every coordinate update that had one.
    pub fn record_sweep(&mut self, record: &SweepRecord) -> Result<()> {
        if record.updates.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: record.updates.len() });
        }
        for u in &record.updates {
            if let Some(j) = u.selected {
                if j >= self.m {
                    return Err(Error::invalid(format!("selected proposal {j} out of range for m = {}", self.m)));
                }
                self.counts[u.coordinate * self.m + j] += 1;
            }
        }
        self.updates += 1;
        Ok(())
    }

    /// Call once after each sweep with the 1-based sweep number. Returns
    /// whether the grid changed.
    pub fn maybe_adapt(&mut self, grid: &mut ScaleGrid, iteration: u64) -> Result<bool> {
        if iteration == 0 || !iteration.is_multiple_of(self.beta) {
            return Ok(false);
        }
        if grid.dim() != self.d || grid.m() != self.m {
            return Err(Error::DimensionMismatch { expected: self.d * self.m, found: grid.dim() * grid.m() });
        }
        let u = self.coin.uniform();
        let mut changed = false;
        if u <= self.probability {
            for k in 0..self.d {
                let counts = &self.counts[k * self.m..(k + 1) * self.m];
                let (row, fired) = adapt_row(counts, grid.row(k), self.bounds)?;
                for f in fired {
                    self.events.push(AdaptationEvent {
                        iteration,
                        coordinate: k,
                        branch: f.branch,
                        sigma_min_old: f.min_old,
                        sigma_min_new: f.min_new,
                        sigma_max_old: f.max_old,
                        sigma_max_new: f.max_new,
                    });
                }
                if row.as_slice() != grid.row(k) {
                    grid.set_row(k, &row);
                    changed = true;
                }
            }
        }
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.updates = 0;
        self.attempt = iteration / self.beta;
        self.probability = adaptation_probability(self.attempt)?;
        Ok(changed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Fired {
    pub branch: Branch,
    pub min_old: f64,
    pub min_new: f64,
    pub max_old: f64,
    pub max_new: f64,
}

/// Applies the four end-point rules to one row given its window counts.
///
/// Rates are compared in integer arithmetic: `rate > 2/m` is
/// `count * m > 2 * total` and `rate < 1/(2m)` is `2 * m * count < total`.
/// A coordinate with no selections in the window is left alone.
pub(crate) fn adapt_row(counts: &[u64], row: &[f64], bounds: ScaleBounds) -> Result<(Vec<f64>, Vec<Fired>)> {
    let m = row.len();
    let total: u64 = counts.iter().sum();
    let mut row = row.to_vec();
    let mut fired = Vec::new();
    if total == 0 || m < 2 {
        return Ok((row, fired));
    }
    let m64 = m as u64;
    let over = |c: u64| c * m64 > 2 * total;
    let under = |c: u64| 2 * m64 * c < total;
    let (c_first, c_last) = (counts[0], counts[m - 1]);

    let mut apply = |row: &mut Vec<f64>, branch: Branch, new_min: f64, new_max: f64| -> Result<()> {
        let (min_old, max_old) = (row[0], row[m - 1]);
        let lo = bounds.clamp(new_min);
        let hi = bounds.clamp(new_max);
        let mut next = respace_log2(lo, hi, m)?;
        next.iter_mut().for_each(|s| *s = bounds.clamp(*s));
        fired.push(Fired { branch, min_old, min_new: next[0], max_old, max_new: next[m - 1] });
        *row = next;
        Ok(())
    };

    if over(c_last) {
        let (lo, hi) = (row[0], row[m - 1]);
        apply(&mut row, Branch::DoubleMax, lo, 2.0 * hi)?;
    } else if under(c_last) && row[0] < row[m - 1] / 2.0 {
        let (lo, hi) = (row[0], row[m - 1]);
        apply(&mut row, Branch::HalveMax, lo, hi / 2.0)?;
    }
    if over(c_first) {
        let (lo, hi) = (row[0], row[m - 1]);
        apply(&mut row, Branch::HalveMin, lo / 2.0, hi)?;
    } else if under(c_first) && 2.0 * row[0] < row[m - 1] {
        let (lo, hi) = (row[0], row[m - 1]);
        apply(&mut row, Branch::DoubleMin, 2.0 * lo, hi)?;
    }
    Ok((row, fired))
}
