//! Online tuning of proposal scales.
//!
//! [`AdaptationState`] drives the multiple-try grid: at every `beta`-th
//! sweep it flips a coin with probability `P_a` and, on heads, doubles or
//! halves the end points of each coordinate's row according to how often
//! the smallest and largest scales were selected in the last window, then
//! respaces the row log-equidistantly. [`AcmhState`] is the
//! acceptance-rate controller used for the single-proposal baseline.

mod acmh;
mod acmtm;

pub use acmh::{acmh_step_size, AcmhState, ACMH_TARGET_RATE};
pub use acmtm::{AdaptationEvent, AdaptationState, Branch, DEFAULT_BETA};

use crate::error::{Error, Result};

/// `max(0.99^(a-1), a^(-1/2))`.
pub fn adaptation_probability(a: u64) -> Result<f64> {
    if a < 1 {
        return Err(Error::invalid("adaptation attempt index starts at 1"));
    }
    let a = a as f64;
    Ok(0.99f64.powf(a - 1.0).max(a.sqrt().recip()))
}

/// `m` scales log-equidistant between `sigma_min` and `sigma_max`.
pub fn respace_log2(sigma_min: f64, sigma_max: f64, m: usize) -> Result<Vec<f64>> {
    if !(sigma_min > 0.0 && sigma_max.is_finite() && sigma_min <= sigma_max) || m == 0 {
        return Err(Error::invalid(format!(
            "respacing needs 0 < min <= max and m >= 1, got ({sigma_min}, {sigma_max}, {m})"
        )));
    }
    if m == 1 {
        return Ok(vec![sigma_min]);
    }
    let lo = sigma_min.log2();
    let span = sigma_max.log2() - lo;
    let last = (m - 1) as f64;
    let mut out: Vec<f64> = (0..m).map(|j| (lo + span * j as f64 / last).exp2()).collect();
    // pin the end points exactly
    out[0] = sigma_min;
    out[m - 1] = sigma_max;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_values() {
        assert_eq!(adaptation_probability(1).unwrap(), 1.0);
        let p101 = adaptation_probability(101).unwrap();
        assert!((p101 - 0.366_032_341_273_229_2).abs() < 1e-12, "{p101}");
        assert!((adaptation_probability(10_000).unwrap() - 0.01).abs() < 1e-15);
        assert!(adaptation_probability(0).is_err());
    }

    #[test]
    fn probability_diminishes_but_is_not_summable() {
        let mut prev = 1.0;
        for a in 1..=100_000u64 {
            let p = adaptation_probability(a).unwrap();
            assert!(p <= prev);
            assert!(p >= 1.0 / (a as f64).sqrt());
            prev = p;
        }
        assert!(prev < 0.004);
    }

    #[test]
    fn respace_powers_of_two() {
        assert_eq!(respace_log2(1.0, 16.0, 5).unwrap(), vec![1.0, 2.0, 4.0, 8.0, 16.0]);
    }

    #[test]
    fn respace_twentieth_root() {
        let r = respace_log2(4.0, 8.0, 20).unwrap();
        assert!((r[1] - 4.1486).abs() < 5e-5);
        assert!((r[1] / r[0] - (1.0f64 / 19.0).exp2()).abs() < 1e-12);
        assert_eq!(r[19], 8.0);
    }

    #[test]
    fn respace_degenerate() {
        assert_eq!(respace_log2(3.0, 3.0, 4).unwrap(), vec![3.0; 4]);
        assert_eq!(respace_log2(3.0, 9.0, 1).unwrap(), vec![3.0]);
        assert!(respace_log2(0.0, 1.0, 3).is_err());
        assert!(respace_log2(2.0, 1.0, 3).is_err());
        assert!(respace_log2(1.0, 2.0, 0).is_err());
    }
}
