//! Side-by-side ESS comparison of replicate sets.

use std::path::Path;

use super::runner::ReplicateReport;
use crate::error::{Error, Result};

/// Per-coordinate mean ESS and mean ESS per second of one sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonInput {
    pub label: String,
    pub ess: Vec<f64>,
    pub ess_per_second: Vec<f64>,
}

fn nan_mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.filter(|v| v.is_finite()).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

impl ComparisonInput {
    /// From `(wall_time, ess)` pairs, one per replicate.
    pub fn from_rows(label: impl Into<String>, rows: &[(f64, Vec<f64>)]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.1.len());
        if d == 0 {
            return Err(Error::InsufficientData("comparison needs at least one replicate".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.1.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.1.len() });
        }
        let ess = (0..d).map(|k| nan_mean(rows.iter().map(|r| r.1[k]))).collect();
        let ess_per_second = (0..d).map(|k| nan_mean(rows.iter().map(|r| r.1[k] / r.0))).collect();
        Ok(Self { label: label.into(), ess, ess_per_second })
    }

    pub fn from_report(label: impl Into<String>, report: &ReplicateReport) -> Result<Self> {
        let rows: Vec<(f64, Vec<f64>)> = report.results.iter().map(|r| (r.wall_time, r.report.ess.clone())).collect();
        Self::from_rows(label, &rows)
    }

    /// Reads a `summary.csv`.
    pub fn from_summary_csv(label: impl Into<String>, path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let wall =
            col("wall_time").ok_or_else(|| Error::invalid(format!("{} has no wall_time column", path.display())))?;
        let ess_cols: Vec<usize> = (1..).map_while(|k| col(&format!("ess_{k}"))).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("{}: bad number '{}': {e}", path.display(), &record[i])))
            };
            rows.push((parse(wall)?, ess_cols.iter().map(|&i| parse(i)).collect::<Result<Vec<_>>>()?));
        }
        Self::from_rows(label, &rows)
    }
}

/// One line of a comparison; ratios are relative to the first input.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub coordinate: usize,
    pub label: String,
    pub ess: f64,
    pub ess_per_second: f64,
    pub ess_ratio: f64,
    pub ess_per_second_ratio: f64,
}

pub fn compare_reports(inputs: &[ComparisonInput]) -> Result<Vec<ComparisonRow>> {
    let base = inputs.first().ok_or_else(|| Error::invalid("nothing to compare"))?;
    let d = base.ess.len();
    if let Some(bad) = inputs.iter().find(|i| i.ess.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.ess.len() });
    }
    let mut rows = Vec::with_capacity(d * inputs.len());
    for k in 0..d {
        for input in inputs {
            rows.push(ComparisonRow {
                coordinate: k,
                label: input.label.clone(),
                ess: input.ess[k],
                ess_per_second: input.ess_per_second[k],
                ess_ratio: input.ess[k] / base.ess[k],
                ess_per_second_ratio: input.ess_per_second[k] / base.ess_per_second[k],
            });
        }
    }
    Ok(rows)
}

pub fn write_comparison(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["coordinate", "label", "ess", "ess_per_second", "ess_ratio", "ess_per_second_ratio"])?;
    for r in rows {
        w.write_record([
            (r.coordinate + 1).to_string(),
            r.label.clone(),
            r.ess.to_string(),
            r.ess_per_second.to_string(),
            r.ess_ratio.to_string(),
            r.ess_per_second_ratio.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
