use super::{ChainTrace, RegionPredicate};

/// Per-coordinate, per-proposal selection and post-selection acceptance
/// frequencies. Acceptance cells for never-selected proposals are `NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTables {
    pub selection: Vec<Vec<f64>>,
    pub acceptance: Vec<Vec<f64>>,
    /// Number of sweeps with a selection, per coordinate.
    pub selections: Vec<u64>,
}

impl FrequencyTables {
    /// Index of the most frequently selected proposal of coordinate `k`.
    pub fn mode(&self, k: usize) -> Option<usize> {
        if self.selections[k] == 0 {
            return None;
        }
        self.selection[k].iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).map(|(j, _)| j)
    }
}

/// Tables split by a predicate on the pre-sweep state.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionTables {
    pub inside: FrequencyTables,
    pub outside: FrequencyTables,
}

/// Frequency tables over post-burn-in sweeps, optionally restricted to
/// sweeps whose starting state satisfies `region`.
pub fn frequency_tables(trace: &ChainTrace, m: usize, region: Option<RegionPredicate<'_>>) -> FrequencyTables {
    let d = trace.dim();
    let mut selected = vec![vec![0u64; m]; d];
    let mut accepted = vec![vec![0u64; m]; d];
    let start = trace.burn_in.min(trace.updates.len());
    for (i, sweep) in trace.updates.iter().enumerate().skip(start) {
        if let Some(pred) = region {
            if !pred(trace.state_before(i)) {
                continue;
            }
        }
        for u in sweep {
            if let Some(j) = u.selected {
                selected[u.coordinate][j] += 1;
                accepted[u.coordinate][j] += u64::from(u.accepted);
            }
        }
    }
    let selections: Vec<u64> = selected.iter().map(|r| r.iter().sum()).collect();
    let selection = selected
        .iter()
        .zip(&selections)
        .map(|(row, &total)| row.iter().map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 }).collect())
        .collect();
    let acceptance = selected
        .iter()
        .zip(&accepted)
        .map(|(s, a)| s.iter().zip(a).map(|(&s, &a)| if s == 0 { f64::NAN } else { a as f64 / s as f64 }).collect())
        .collect();
    FrequencyTables { selection, acceptance, selections }
}
