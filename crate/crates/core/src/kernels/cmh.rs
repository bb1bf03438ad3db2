use super::{accept, CoordinateUpdateRecord, ScaleGrid, SweepRecord};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::targets::TargetModel;

/// Single random-walk Metropolis update of coordinate `k`.
///
/// Consumes one normal and one uniform regardless of outcome. The record
/// carries `selected = Some(proposal)`.
pub fn cmh_coordinate_update(
    target: &TargetModel,
    x: &mut [f64],
    k: usize,
    sigma: f64,
    proposal: usize,
    rng: &mut RngStream,
) -> CoordinateUpdateRecord {
    let xk = x[k];
    let y = xk + sigma * rng.standard_normal();
    let u = rng.uniform();
    let mut lp = [0.0; 2];
    target.log_density_along(x, k, &[xk, y], &mut lp);
    let log_ratio = if lp[1] == f64::NEG_INFINITY { f64::NEG_INFINITY } else { (lp[1] - lp[0]).min(0.0) };
    let accepted = log_ratio > f64::NEG_INFINITY && accept(log_ratio, u);
    if accepted {
        x[k] = y;
    }
    CoordinateUpdateRecord {
        coordinate: k,
        selected: Some(proposal),
        accepted,
        jump: if accepted { (y - xk).abs() } else { 0.0 },
        acceptance_prob: log_ratio.exp(),
    }
}

/// Component-wise Metropolis with one scale per coordinate.
pub fn cmh_sweep(target: &TargetModel, x: &mut [f64], scales: &[f64], rng: &mut RngStream) -> Result<SweepRecord> {
    if scales.len() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: scales.len() });
    }
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::invalid("cmh scales must be positive"));
    }
    let updates = scales.iter().enumerate().map(|(k, &s)| cmh_coordinate_update(target, x, k, s, 0, rng)).collect();
    Ok(SweepRecord { updates, state_after: x.to_vec() })
}

/// Per coordinate, picks one of the grid's scales uniformly at random and
/// makes a single Metropolis move with it.
pub fn mixture_cmh_sweep(
    target: &TargetModel,
    x: &mut [f64],
    grid: &ScaleGrid,
    rng: &mut RngStream,
) -> Result<SweepRecord> {
    if grid.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: grid.dim() });
    }
    let updates = (0..target.dim())
        .map(|k| {
            let j = rng.index(grid.m());
            cmh_coordinate_update(target, x, k, grid.get(k, j), j, rng)
        })
        .collect();
    Ok(SweepRecord { updates, state_after: x.to_vec() })
}
