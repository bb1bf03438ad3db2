use super::{accept, CoordinateUpdateRecord, KernelConfig, ScaleGrid, SweepRecord};
use crate::error::{Error, Result};
use crate::rng::{log_sum_exp, RngStream};
use crate::targets::TargetModel;

/// `log pi(x with x_k := y) + alpha * log|y - x_k|`.
pub fn cmtm_log_weight(target: &TargetModel, x: &[f64], k: usize, y: f64, alpha: f64) -> f64 {
    let lp = target.log_density_with_coordinate(x, k, y);
    distance_weight(lp, y, x[k], alpha)
}

fn distance_weight(log_density: f64, candidate: f64, anchor: f64, alpha: f64) -> f64 {
    let dist = (candidate - anchor).abs();
    if dist == 0.0 || log_density == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    log_density + alpha * dist.ln()
}

/// One multiple-try update of coordinate `k`, in place.
///
/// Draw order per call: `m` forward normals, one selection uniform, then
/// (if a candidate was selectable) `m - 1` reverse normals and one
/// acceptance uniform.
pub fn cmtm_coordinate_update(
    target: &TargetModel,
    x: &mut [f64],
    k: usize,
    scales: &[f64],
    cfg: &KernelConfig,
    rng: &mut RngStream,
) -> Result<CoordinateUpdateRecord> {
    let m = scales.len();
    let xk = x[k];
    let alpha = cfg.alpha();

    let forward: Vec<f64> = scales.iter().map(|s| xk + s * rng.standard_normal()).collect();
    let mut fwd_w = vec![0.0; m];
    target.log_density_along(x, k, &forward, &mut fwd_w);
    for (w, y) in fwd_w.iter_mut().zip(&forward) {
        *w = distance_weight(*w, *y, xk, alpha);
    }

    let s = match rng.categorical_logweights(&fwd_w) {
        Ok(s) => s,
        Err(Error::NoSelectableCandidate) => return Ok(CoordinateUpdateRecord::no_selection(k)),
        Err(e) => return Err(e),
    };
    let y = forward[s];

    let reverse: Vec<f64> =
        scales.iter().enumerate().map(|(j, sj)| if j == s { xk } else { y + sj * rng.standard_normal() }).collect();
    // Only coordinate k differs between x and y's state, so x serves as the base.
    let mut rev_w = vec![0.0; m];
    target.log_density_along(x, k, &reverse, &mut rev_w);
    for (w, r) in rev_w.iter_mut().zip(&reverse) {
        *w = distance_weight(*w, *r, y, alpha);
    }

    let log_num = log_sum_exp(&fwd_w);
    let log_den = log_sum_exp(&rev_w);
    if log_den == f64::NEG_INFINITY {
        return Err(Error::Invariant(format!(
            "reverse weights all vanish at coordinate {k}; the chain state has zero density"
        )));
    }
    let log_rho = (log_num - log_den).min(0.0);
    let u = rng.uniform();
    let accepted = accept(log_rho, u);
    if accepted {
        x[k] = y;
    }
    Ok(CoordinateUpdateRecord {
        coordinate: k,
        selected: Some(s),
        accepted,
        jump: if accepted { (y - xk).abs() } else { 0.0 },
        acceptance_prob: log_rho.exp(),
    })
}

/// Updates coordinates `0..d` in order.
pub fn cmtm_sweep(
    target: &TargetModel,
    x: &mut [f64],
    grid: &ScaleGrid,
    cfg: &KernelConfig,
    rng: &mut RngStream,
) -> Result<SweepRecord> {
    if grid.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: grid.dim() });
    }
    let updates = (0..target.dim())
        .map(|k| cmtm_coordinate_update(target, x, k, grid.row(k), cfg, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRecord { updates, state_after: x.to_vec() })
}
