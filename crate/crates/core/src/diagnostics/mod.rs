//! Efficiency diagnostics over a recorded chain.

mod act;
mod tables;

pub use act::{autocorrelation_time, autocovariances, effective_sample_size};
pub use tables::{frequency_tables, FrequencyTables, RegionTables};

/// Predicate on the state at the start of a sweep.
pub type RegionPredicate<'a> = &'a dyn Fn(&[f64]) -> bool;

use crate::error::{Error, Result};
use crate::kernels::{CoordinateUpdateRecord, SweepRecord};
use crate::targets::StateVector;

/// States and update records of one chain, in sweep order.
#[derive(Clone, Debug, Default)]
pub struct ChainTrace {
    pub initial: StateVector,
    pub states: Vec<StateVector>,
    pub updates: Vec<Vec<CoordinateUpdateRecord>>,
    pub burn_in: usize,
    /// Seconds spent in the sweep loop.
    pub wall_time: f64,
}

impl ChainTrace {
    pub fn new(initial: StateVector, burn_in: usize) -> Self {
        Self { initial, burn_in, ..Self::default() }
    }

    pub fn with_capacity(initial: StateVector, burn_in: usize, sweeps: usize) -> Self {
        Self {
            initial,
            states: Vec::with_capacity(sweeps),
            updates: Vec::with_capacity(sweeps),
            burn_in,
            wall_time: 0.0,
        }
    }

    pub fn push(&mut self, record: SweepRecord) {
        self.states.push(record.state_after);
        self.updates.push(record.updates);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn post_burn_in(&self) -> &[StateVector] {
        &self.states[self.burn_in.min(self.states.len())..]
    }

    /// Post-burn-in values of coordinate `k`.
    pub fn coordinate_series(&self, k: usize) -> Vec<f64> {
        self.post_burn_in().iter().map(|s| s[k]).collect()
    }

    /// State before sweep `i`.
    pub fn state_before(&self, i: usize) -> &[f64] {
        if i == 0 {
            &self.initial
        } else {
            &self.states[i - 1]
        }
    }
}

/// Mean of `||X_{n+1} - X_n||^2` over consecutive post-burn-in states.
pub fn average_squared_jump(trace: &ChainTrace) -> Result<f64> {
    let per = squared_jump_per_coordinate(trace)?;
    Ok(per.iter().sum())
}

/// [`average_squared_jump`] divided by the dimension: the mean squared jump
/// of a single coordinate per sweep, the scale on which published ASJ
/// tables for the mixture targets are reported.
pub fn average_squared_jump_per_coordinate(trace: &ChainTrace) -> Result<f64> {
    Ok(average_squared_jump(trace)? / trace.dim() as f64)
}

/// Mean squared jump of each coordinate over post-burn-in pairs.
pub fn squared_jump_per_coordinate(trace: &ChainTrace) -> Result<Vec<f64>> {
    let states = trace.post_burn_in();
    if states.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 post-burn-in states, have {}", states.len())));
    }
    let d = trace.dim();
    let mut sums = vec![0.0; d];
    for w in states.windows(2) {
        for (s, (a, b)) in sums.iter_mut().zip(w[0].iter().zip(&w[1])) {
            *s += (b - a) * (b - a);
        }
    }
    let pairs = (states.len() - 1) as f64;
    Ok(sums.into_iter().map(|s| s / pairs).collect())
}

/// Summary statistics of one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsReport {
    /// Squared jump per sweep averaged over coordinates.
    pub asj: f64,
    /// Squared Euclidean jump of the whole state per sweep (`asj * d`).
    pub asj_total: f64,
    /// Per coordinate; `NaN` where the coordinate never moved.
    pub act: Vec<f64>,
    /// Post-burn-in length divided by ACT; `NaN` alongside an undefined ACT.
    pub ess: Vec<f64>,
    pub tables: FrequencyTables,
    pub region: Option<RegionTables>,
}

/// Computes every diagnostic for a trace recorded with `m` proposals per
/// coordinate, optionally splitting the frequency tables by `region`.
pub fn diagnose(trace: &ChainTrace, m: usize, region: Option<RegionPredicate<'_>>) -> Result<DiagnosticsReport> {
    let asj_total = average_squared_jump(trace)?;
    let asj = asj_total / trace.dim() as f64;
    let mut act = Vec::with_capacity(trace.dim());
    let mut ess = Vec::with_capacity(trace.dim());
    for k in 0..trace.dim() {
        let series = trace.coordinate_series(k);
        match autocorrelation_time(&series) {
            Ok(tau) => {
                act.push(tau);
                ess.push(series.len() as f64 / tau);
            }
            Err(Error::UndefinedAct) => {
                act.push(f64::NAN);
                ess.push(f64::NAN);
            }
            Err(e) => return Err(e),
        }
    }
    let tables = frequency_tables(trace, m, None);
    let region = region.map(|pred| {
        let inside = frequency_tables(trace, m, Some(pred));
        let outside = frequency_tables(trace, m, Some(&|x: &[f64]| !pred(x)));
        RegionTables { inside, outside }
    });
    Ok(DiagnosticsReport { asj, asj_total, act, ess, tables, region })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_of(states: Vec<Vec<f64>>, burn_in: usize) -> ChainTrace {
        let d = states[0].len();
        let mut t = ChainTrace::new(vec![0.0; d], burn_in);
        for s in states {
            t.push(SweepRecord { updates: Vec::new(), state_after: s });
        }
        t
    }

    #[test]
    fn constant_chain_has_zero_jump() {
        let t = trace_of(vec![vec![1.0, 2.0]; 10], 0);
        assert_eq!(average_squared_jump(&t).unwrap(), 0.0);
    }

    #[test]
    fn alternating_chain() {
        let t = trace_of((0..10).map(|i| vec![(i % 2) as f64]).collect(), 0);
        assert_eq!(average_squared_jump(&t).unwrap(), 1.0);
    }

    #[test]
    fn burn_in_is_discarded() {
        let mut states: Vec<Vec<f64>> = (0..5).map(|i| vec![10.0 * i as f64]).collect();
        states.extend(vec![vec![3.0]; 5]);
        let t = trace_of(states, 5);
        assert_eq!(average_squared_jump(&t).unwrap(), 0.0);
    }

    #[test]
    fn too_short_trace() {
        let t = trace_of(vec![vec![1.0]; 3], 2);
        assert!(matches!(average_squared_jump(&t), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn jump_decomposes_over_coordinates() {
        let states: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let f = i as f64;
                vec![(f * 0.7).sin(), f.sqrt(), (f * 1.3).cos() * 4.0]
            })
            .collect();
        let t = trace_of(states, 10);
        let per = squared_jump_per_coordinate(&t).unwrap();
        let total = average_squared_jump(&t).unwrap();
        assert!((per.iter().sum::<f64>() - total).abs() <= 1e-15 * total);
        // independent evaluation straight from the definition
        let post = t.post_burn_in();
        let mut direct = 0.0;
        for w in post.windows(2) {
            direct += w[0].iter().zip(&w[1]).map(|(a, b)| (b - a).powi(2)).sum::<f64>();
        }
        direct /= (post.len() - 1) as f64;
        assert!((direct - total).abs() < 1e-12);
        let per_coord = average_squared_jump_per_coordinate(&t).unwrap();
        assert!((per_coord - direct / 3.0).abs() < 1e-12);
    }
}
