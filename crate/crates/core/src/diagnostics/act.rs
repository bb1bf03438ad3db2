use crate::error::{Error, Result};

/// Biased (divide-by-n) autocovariances up to `max_lag`, inclusive.
pub fn autocovariances(series: &[f64], max_lag: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    (0..=max_lag.min(n.saturating_sub(1))).map(|lag| lag_product(&centered, lag) / n as f64).collect()
}

fn lag_product(centered: &[f64], lag: usize) -> f64 {
    centered[..centered.len() - lag].iter().zip(&centered[lag..]).map(|(a, b)| a * b).sum()
}

/// Integrated autocorrelation time `1 + 2 * sum_k rho_k`, truncated by
/// Geyer's initial positive sequence and floored at 1.
///
/// Autocorrelations are computed lazily lag by lag, so the cost scales with
/// the truncation point rather than the series length squared.
pub fn autocorrelation_time(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!("ACT needs at least 10 values, have {n}")));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("ACT series must be finite"));
    }
    if series.iter().all(|x| *x == series[0]) {
        return Err(Error::UndefinedAct);
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0 = lag_product(&centered, 0);
    // pairs Gamma_t = rho_{2t} + rho_{2t+1}; tau = 2 * sum Gamma_t - 1
    let mut sum_pairs = 0.0;
    let mut t = 0usize;
    while 2 * t + 1 < n {
        let r0 = lag_product(&centered, 2 * t) / c0;
        let r1 = lag_product(&centered, 2 * t + 1) / c0;
        let pair = r0 + r1;
        if pair <= 0.0 {
            break;
        }
        sum_pairs += pair;
        t += 1;
    }
    Ok((2.0 * sum_pairs - 1.0).max(1.0))
}

/// `n / tau`.
pub fn effective_sample_size(series: &[f64]) -> Result<f64> {
    Ok(series.len() as f64 / autocorrelation_time(series)?)
}
