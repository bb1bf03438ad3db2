//! CSV artifacts. Coordinates and proposals are 1-based in every file.

use std::fs;
use std::path::Path;

use super::runner::{AlphaSweepRow, ReplicateReport, ReplicateResult};
use crate::diagnostics::FrequencyTables;
use crate::error::{Error, Result};
use crate::kernels::ScaleGrid;

fn num(v: f64) -> String {
    format!("{v}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

fn summary_header(d: usize) -> Vec<String> {
    let mut h = vec!["replicate".to_string(), "asj".to_string(), "wall_time".to_string()];
    h.extend((1..=d).map(|k| format!("act_{k}")));
    h.extend((1..=d).map(|k| format!("ess_{k}")));
    h
}

/// `summary.csv`: one row per replicate.
pub fn write_summary(path: &Path, results: &[ReplicateResult]) -> Result<()> {
    let d = results.first().map_or(0, |r| r.report.act.len());
    let mut w = writer(path)?;
    w.write_record(summary_header(d))?;
    for r in results {
        let mut row = vec![r.replicate.to_string(), num(r.report.asj), num(r.wall_time)];
        row.extend(r.report.act.iter().map(|v| num(*v)));
        row.extend(r.report.ess.iter().map(|v| num(*v)));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_table(path: &Path, grid: &ScaleGrid, table: &[Vec<f64>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["coordinate", "proposal", "sigma", "frequency"])?;
    for (k, row) in table.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            w.write_record([(k + 1).to_string(), (j + 1).to_string(), num(grid.get(k, j)), num(*f)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `selection.csv` and `acceptance.csv` with `prefix` prepended to the names.
pub fn write_tables(dir: &Path, prefix: &str, grid: &ScaleGrid, tables: &FrequencyTables) -> Result<()> {
    write_table(&dir.join(format!("{prefix}selection.csv")), grid, &tables.selection)?;
    write_table(&dir.join(format!("{prefix}acceptance.csv")), grid, &tables.acceptance)
}

pub fn write_final_grid(path: &Path, grid: &ScaleGrid) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["coordinate", "proposal", "sigma"])?;
    for (k, row) in grid.rows().enumerate() {
        for (j, s) in row.iter().enumerate() {
            w.write_record([(k + 1).to_string(), (j + 1).to_string(), num(*s)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_adaptation_log(path: &Path, result: &ReplicateResult) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "iteration",
        "coordinate",
        "branch",
        "sigma_min_old",
        "sigma_min_new",
        "sigma_max_old",
        "sigma_max_new",
    ])?;
    for e in &result.events {
        w.write_record([
            e.iteration.to_string(),
            (e.coordinate + 1).to_string(),
            e.branch.as_str().to_string(),
            num(e.sigma_min_old),
            num(e.sigma_min_new),
            num(e.sigma_max_old),
            num(e.sigma_max_new),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_trace(path: &Path, states: &[(usize, Vec<f64>)]) -> Result<()> {
    let d = states.first().map_or(0, |s| s.1.len());
    let mut w = writer(path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend((1..=d).map(|k| format!("x_{k}")));
    w.write_record(header)?;
    for (i, s) in states {
        let mut row = vec![i.to_string()];
        row.extend(s.iter().map(|v| num(*v)));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Every per-replicate file into `dir`.
pub fn write_replicate(dir: &Path, result: &ReplicateResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_summary(&dir.join("summary.csv"), std::slice::from_ref(result))?;
    write_tables(dir, "", &result.final_grid, &result.report.tables)?;
    if let Some(region) = &result.report.region {
        write_tables(dir, "inside_", &result.final_grid, &region.inside)?;
        write_tables(dir, "outside_", &result.final_grid, &region.outside)?;
    }
    write_final_grid(&dir.join("final_grid.csv"), &result.final_grid)?;
    write_adaptation_log(&dir.join("adaptation_log.csv"), result)?;
    if let Some(states) = &result.thinned {
        write_trace(&dir.join("trace.csv"), states)?;
    }
    Ok(())
}

/// Min, median, mean and max of one metric over replicates, ignoring `NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub metric: String,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl AggregateRow {
    pub fn from_values(metric: impl Into<String>, values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        v.sort_by(f64::total_cmp);
        let metric = metric.into();
        if v.is_empty() {
            return Self { metric, min: f64::NAN, median: f64::NAN, mean: f64::NAN, max: f64::NAN };
        }
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        let mean = v.iter().sum::<f64>() / n as f64;
        Self { metric, min: v[0], median, mean: mean.clamp(v[0], v[n - 1]), max: v[n - 1] }
    }
}

/// Rows for `asj`, `wall_time`, `act_k` and `ess_k`.
pub fn aggregate(report: &ReplicateReport) -> Vec<AggregateRow> {
    let res = &report.results;
    let mut rows = vec![
        AggregateRow::from_values("asj", &res.iter().map(|r| r.report.asj).collect::<Vec<_>>()),
        AggregateRow::from_values("wall_time", &res.iter().map(|r| r.wall_time).collect::<Vec<_>>()),
    ];
    for k in 0..report.dim {
        rows.push(AggregateRow::from_values(
            format!("act_{}", k + 1),
            &res.iter().map(|r| r.report.act[k]).collect::<Vec<_>>(),
        ));
    }
    for k in 0..report.dim {
        rows.push(AggregateRow::from_values(
            format!("ess_{}", k + 1),
            &res.iter().map(|r| r.report.ess[k]).collect::<Vec<_>>(),
        ));
    }
    rows
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["metric", "min", "median", "mean", "max"])?;
    for r in rows {
        w.write_record([r.metric.clone(), num(r.min), num(r.median), num(r.mean), num(r.max)])?;
    }
    w.flush()?;
    Ok(())
}

/// Cell-wise mean of tables over replicates; acceptance cells average only
/// replicates where they are defined.
pub fn mean_tables(tables: &[&FrequencyTables]) -> FrequencyTables {
    let first = tables[0];
    let mean = |pick: fn(&FrequencyTables) -> &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        pick(first)
            .iter()
            .enumerate()
            .map(|(k, row)| {
                (0..row.len())
                    .map(|j| {
                        let vals: Vec<f64> = tables.iter().map(|t| pick(t)[k][j]).filter(|v| !v.is_nan()).collect();
                        if vals.is_empty() {
                            f64::NAN
                        } else {
                            vals.iter().sum::<f64>() / vals.len() as f64
                        }
                    })
                    .collect()
            })
            .collect()
    };
    FrequencyTables {
        selection: mean(|t| &t.selection),
        acceptance: mean(|t| &t.acceptance),
        selections: (0..first.selections.len()).map(|k| tables.iter().map(|t| t.selections[k]).sum()).collect(),
    }
}

/// Cell-wise geometric mean of final grids, which is the grid itself for
/// non-adaptive samplers.
pub fn mean_grid(grids: &[&ScaleGrid]) -> Result<ScaleGrid> {
    let first = grids[0];
    let rows = (0..first.dim())
        .map(|k| {
            (0..first.m())
                .map(|j| (grids.iter().map(|g| g.get(k, j).ln()).sum::<f64>() / grids.len() as f64).exp())
                .collect()
        })
        .collect();
    let bounds = crate::kernels::ScaleBounds::new(f64::MIN_POSITIVE, f64::MAX)?;
    ScaleGrid::from_rows(rows, bounds)
}

/// Status of every replicate of a set.
pub fn write_manifest(path: &Path, statuses: &[(u64, std::result::Result<(), String>)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["replicate", "status", "message"])?;
    for (id, s) in statuses {
        match s {
            Ok(()) => w.write_record([id.to_string(), "ok".to_string(), String::new()])?,
            Err(msg) => w.write_record([id.to_string(), "failed".to_string(), msg.clone()])?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Directory name of replicate `id` inside a replicate set.
pub fn replicate_dir(id: u64) -> String {
    format!("replicate_{id:04}")
}

/// Top-level files of a replicate set plus one directory per replicate.
pub fn write_replicate_report(dir: &Path, report: &ReplicateReport) -> Result<()> {
    if report.results.is_empty() {
        return Err(Error::invalid("no replicates to write"));
    }
    fs::create_dir_all(dir)?;
    write_summary(&dir.join("summary.csv"), &report.results)?;
    write_aggregate(&dir.join("aggregate.csv"), &aggregate(report))?;
    let tables: Vec<&FrequencyTables> = report.results.iter().map(|r| &r.report.tables).collect();
    let grids: Vec<&ScaleGrid> = report.results.iter().map(|r| &r.final_grid).collect();
    let grid = mean_grid(&grids)?;
    write_tables(dir, "", &grid, &mean_tables(&tables))?;
    let regions: Vec<_> = report.results.iter().filter_map(|r| r.report.region.as_ref()).collect();
    if regions.len() == report.results.len() {
        write_tables(dir, "inside_", &grid, &mean_tables(&regions.iter().map(|r| &r.inside).collect::<Vec<_>>()))?;
        write_tables(dir, "outside_", &grid, &mean_tables(&regions.iter().map(|r| &r.outside).collect::<Vec<_>>()))?;
    }
    for r in &report.results {
        write_replicate(&dir.join(replicate_dir(r.replicate)), r)?;
    }
    Ok(())
}

/// `alpha_sweep.csv` (alpha, replicate, asj, act_1..act_d) and
/// `alpha_selection.csv` (alpha, replicate, coordinate, proposal, sigma, frequency).
pub fn write_alpha_sweep(dir: &Path, rows: &[AlphaSweepRow]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let d = rows.first().map_or(0, |r| r.result.report.act.len());
    let mut w = writer(&dir.join("alpha_sweep.csv"))?;
    let mut header = vec!["alpha".to_string(), "replicate".to_string(), "asj".to_string()];
    header.extend((1..=d).map(|k| format!("act_{k}")));
    w.write_record(header)?;
    for r in rows {
        let mut row = vec![num(r.alpha), r.result.replicate.to_string(), num(r.result.report.asj)];
        row.extend(r.result.report.act.iter().map(|v| num(*v)));
        w.write_record(row)?;
    }
    w.flush()?;

    let mut w = writer(&dir.join("alpha_selection.csv"))?;
    w.write_record(["alpha", "replicate", "coordinate", "proposal", "sigma", "frequency"])?;
    for r in rows {
        for (k, table) in r.result.report.tables.selection.iter().enumerate() {
            for (j, f) in table.iter().enumerate() {
                w.write_record([
                    num(r.alpha),
                    r.result.replicate.to_string(),
                    (k + 1).to_string(),
                    (j + 1).to_string(),
                    num(r.result.final_grid.get(k, j)),
                    num(*f),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
