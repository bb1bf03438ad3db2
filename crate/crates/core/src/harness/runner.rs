//! Running chains and replicate sets.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentSpec, SamplerPlan};
use crate::adaptation::{AcmhState, AdaptationEvent, AdaptationState};
use crate::diagnostics::{diagnose, ChainTrace, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::kernels::{cmh_sweep, cmtm_sweep, mixture_cmh_sweep, ScaleBounds, ScaleGrid};
use crate::rng::RngStream;
use crate::targets::{StateVector, TargetModel};

/// Stream ids with this bit set drive the adaptation coin, so a replicate's
/// kernel stream is `(base_seed, replicate_id)` and its coin stream never
/// collides with any kernel stream.
pub const COIN_STREAM_FLAG: u64 = 1 << 63;

/// Everything one chain produces before diagnostics.
#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub trace: ChainTrace,
    /// Grid in effect after the last sweep; single-proposal samplers report
    /// their scales as a one-column grid.
    pub final_grid: ScaleGrid,
    pub events: Vec<AdaptationEvent>,
}

/// Runs `iterations` sweeps of `plan` from the target's initial state.
pub fn run_chain(
    target: &TargetModel,
    plan: &SamplerPlan,
    iterations: usize,
    burn_in: usize,
    seed: u64,
    stream_id: u64,
) -> Result<ChainOutput> {
    if stream_id & COIN_STREAM_FLAG != 0 {
        return Err(Error::invalid("replicate ids must be below 2^63"));
    }
    let mut rng = RngStream::new(seed, stream_id);
    let mut x: StateVector = target.initial_state().to_vec();
    let mut trace = ChainTrace::with_capacity(x.clone(), burn_in, iterations);
    let d = target.dim();
    let mut events = Vec::new();

    let start = Instant::now();
    let final_grid = match plan {
        SamplerPlan::Cmh { scales } => {
            for _ in 0..iterations {
                trace.push(cmh_sweep(target, &mut x, scales, &mut rng)?);
            }
            column_grid(scales, ScaleBounds::default())?
        }
        SamplerPlan::Acmh { scales, batch, bounds } => {
            let mut scales = scales.clone();
            let mut state = AcmhState::new(d, *batch, *bounds)?;
            for _ in 0..iterations {
                let record = cmh_sweep(target, &mut x, &scales, &mut rng)?;
                state.observe(&record, &mut scales)?;
                trace.push(record);
            }
            column_grid(&scales, *bounds)?
        }
        SamplerPlan::MixtureCmh { grid } => {
            for _ in 0..iterations {
                trace.push(mixture_cmh_sweep(target, &mut x, grid, &mut rng)?);
            }
            grid.clone()
        }
        SamplerPlan::Cmtm { grid, kernel } => {
            for _ in 0..iterations {
                trace.push(cmtm_sweep(target, &mut x, grid, kernel, &mut rng)?);
            }
            grid.clone()
        }
        SamplerPlan::Acmtm { grid, kernel, beta, bounds } => {
            let mut grid = grid.clone();
            let coin = RngStream::new(seed, stream_id | COIN_STREAM_FLAG);
            let mut state = AdaptationState::new(d, grid.m(), *beta, *bounds, coin)?;
            for t in 1..=iterations as u64 {
                let record = cmtm_sweep(target, &mut x, &grid, kernel, &mut rng)?;
                state.record_sweep(&record)?;
                state.maybe_adapt(&mut grid, t)?;
                trace.push(record);
            }
            events = state.into_events();
            grid
        }
    };
    trace.wall_time = start.elapsed().as_secs_f64();
    Ok(ChainOutput { trace, final_grid, events })
}

fn column_grid(scales: &[f64], bounds: ScaleBounds) -> Result<ScaleGrid> {
    ScaleGrid::from_rows(scales.iter().map(|s| vec![*s]).collect(), bounds)
}

/// One replicate: diagnostics, final grid, adaptation log and loop time.
#[derive(Clone, Debug)]
pub struct ReplicateResult {
    pub replicate: u64,
    pub report: DiagnosticsReport,
    pub final_grid: ScaleGrid,
    pub events: Vec<AdaptationEvent>,
    /// Seconds in the sweep loop; zero when timing is disabled.
    pub wall_time: f64,
    /// `(sweep, state)` every `thin` sweeps, kept only with `full_trace`.
    pub thinned: Option<Vec<(usize, StateVector)>>,
}

/// Runs replicate `replicate_id` of `spec` with the sampler `plan`.
pub fn run_with_plan(
    spec: &ExperimentSpec,
    target: &TargetModel,
    plan: &SamplerPlan,
    replicate_id: u64,
) -> Result<ReplicateResult> {
    let out = run_chain(target, plan, spec.iterations, spec.burn_in(), spec.base_seed, replicate_id)?;
    let region = spec.region;
    let predicate = move |x: &[f64]| region.is_some_and(|r| r.contains(x));
    let report = diagnose(&out.trace, plan.m(), region.is_some().then_some(&predicate as &dyn Fn(&[f64]) -> bool))?;
    let thinned = spec.full_trace.then(|| {
        out.trace
            .states
            .iter()
            .enumerate()
            .filter(|(i, _)| (i + 1) % spec.thin == 0)
            .map(|(i, s)| (i + 1, s.clone()))
            .collect()
    });
    Ok(ReplicateResult {
        replicate: replicate_id,
        report,
        final_grid: out.final_grid,
        events: out.events,
        wall_time: if spec.timing { out.trace.wall_time } else { 0.0 },
        thinned,
    })
}

/// Runs one replicate of a validated spec.
pub fn run_experiment(spec: &ExperimentSpec, replicate_id: u64) -> Result<ReplicateResult> {
    let target = spec.build_target()?;
    let plan = spec.build_sampler(target.dim())?;
    run_with_plan(spec, &target, &plan, replicate_id)
}

/// All replicates of one spec, in replicate order.
#[derive(Clone, Debug)]
pub struct ReplicateReport {
    pub label: String,
    pub dim: usize,
    pub m: usize,
    pub results: Vec<ReplicateResult>,
}

/// Outcome of a replicate set where some replicates may have failed.
#[derive(Debug)]
pub struct ReplicateOutcome {
    pub label: String,
    pub dim: usize,
    pub m: usize,
    pub results: Vec<(u64, Result<ReplicateResult>)>,
}

impl ReplicateOutcome {
    /// The full report, or the first failure wrapped with its replicate id.
    pub fn into_report(self) -> Result<ReplicateReport> {
        let mut results = Vec::with_capacity(self.results.len());
        for (id, r) in self.results {
            results.push(r.map_err(|e| Error::Replicate { replicate: id, source: Box::new(e) })?);
        }
        Ok(ReplicateReport { label: self.label, dim: self.dim, m: self.m, results })
    }
}

pub(crate) fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Invariant(format!("cannot start worker pool: {e}")))
}

/// Runs replicates `0..spec.replicates` on a pool of `spec.threads` workers,
/// keeping every outcome.
pub fn run_replicate_outcomes(spec: &ExperimentSpec) -> Result<ReplicateOutcome> {
    let target = spec.build_target()?;
    let plan = spec.build_sampler(target.dim())?;
    let results = pool(spec.threads)?.install(|| {
        (0..spec.replicates).into_par_iter().map(|id| (id, run_with_plan(spec, &target, &plan, id))).collect::<Vec<_>>()
    });
    Ok(ReplicateOutcome { label: spec.sampler.kind.as_str().to_string(), dim: target.dim(), m: plan.m(), results })
}

/// Runs every replicate and fails on the first replicate error.
pub fn run_replicates(spec: &ExperimentSpec) -> Result<ReplicateReport> {
    run_replicate_outcomes(spec)?.into_report()
}

/// One row of an alpha sweep.
#[derive(Clone, Debug)]
pub struct AlphaSweepRow {
    pub alpha: f64,
    pub result: ReplicateResult,
}

/// Runs replicates `0..spec.replicates` of a CMTM spec for every alpha.
pub fn alpha_sweep(spec: &ExperimentSpec, alphas: &[f64]) -> Result<Vec<AlphaSweepRow>> {
    if alphas.is_empty() {
        return Err(Error::invalid("alpha sweep needs at least one alpha"));
    }
    let target = spec.build_target()?;
    let base = spec.build_sampler(target.dim())?;
    let plans = alphas.iter().map(|a| base.with_alpha(*a).map(|p| (*a, p))).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(f64, &SamplerPlan, u64)> =
        plans.iter().flat_map(|(a, p)| (0..spec.replicates).map(move |r| (*a, p, r))).collect();
    pool(spec.threads)?.install(|| {
        jobs.into_par_iter()
            .map(|(alpha, plan, r)| Ok(AlphaSweepRow { alpha, result: run_with_plan(spec, &target, plan, r)? }))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;

    fn spec(sampler: &str, extra: &str) -> ExperimentSpec {
        let text = format!(
            r#"
iterations = 400
burn_in = 100
replicates = 3
base_seed = 7
timing = false
{extra}

[target]
kind = "gaussian_mixture"
preset = "mixture4"

[sampler]
{sampler}
"#
        );
        ExperimentSpec::from_toml_str(&text, Path::new("t.toml")).unwrap()
    }

    #[test]
    fn report_shapes() {
        let s = spec("kind = \"cmtm\"\nm = 20", "");
        let r = run_experiment(&s, 0).unwrap();
        assert_eq!(r.report.act.len(), 4);
        assert_eq!(r.report.ess.len(), 4);
        assert_eq!(r.final_grid.m(), 20);
        assert_eq!(r.wall_time, 0.0);
        assert!(r.thinned.is_none());
    }

    #[test]
    fn replicate_ids_are_streams() {
        let s = spec("kind = \"cmtm\"\nm = 5", "");
        let a = run_experiment(&s, 1).unwrap();
        let b = run_experiment(&s, 1).unwrap();
        let c = run_experiment(&s, 2).unwrap();
        assert_eq!(a.report, b.report);
        assert_ne!(a.report.asj, c.report.asj);
    }

    #[test]
    fn parallel_matches_serial() {
        let s = spec("kind = \"acmtm\"\nm = 6\nbeta = 20", "threads = 3");
        let report = run_replicates(&s).unwrap();
        assert_eq!(report.results.len(), 3);
        for r in &report.results {
            let serial = run_experiment(&s, r.replicate).unwrap();
            assert_eq!(serial.report, r.report);
            assert_eq!(serial.final_grid, r.final_grid);
            assert_eq!(serial.events, r.events);
        }
    }

    #[test]
    fn every_sampler_runs() {
        for sampler in [
            "kind = \"cmh\"\nscale = 2.0",
            "kind = \"acmh\"\nbatch = 50",
            "kind = \"mixture_cmh\"\nm = 5",
            "kind = \"cmtm\"\nscales = [0.5, 1.0, 2.0]\nalpha = 1.0",
            "kind = \"acmtm\"\nm = 4\nbeta = 10",
        ] {
            let s = spec(sampler, "full_trace = true\nthin = 50");
            let r = run_experiment(&s, 0).unwrap();
            assert!(r.report.asj.is_finite() && r.report.asj > 0.0, "{sampler}");
            let thinned = r.thinned.unwrap();
            assert_eq!(thinned.len(), 8);
            assert_eq!(thinned[0].0, 50);
        }
    }

    #[test]
    fn acmh_scales_move() {
        let s = spec("kind = \"acmh\"\nbatch = 50\nscale = 1.0", "");
        let r = run_experiment(&s, 0).unwrap();
        assert_eq!(r.final_grid.m(), 1);
        assert!((0..4).any(|k| r.final_grid.get(k, 0) != 1.0));
    }

    #[test]
    fn region_tables_present_when_configured() {
        let s = spec("kind = \"cmtm\"\nm = 5", "region = { coordinate = 1, threshold = 8.0 }");
        let r = run_experiment(&s, 0).unwrap();
        let region = r.report.region.unwrap();
        let total: u64 = region.inside.selections[0] + region.outside.selections[0];
        assert_eq!(total, r.report.tables.selections[0]);
    }

    #[test]
    fn sweep_rows_per_alpha() {
        let s = spec("kind = \"cmtm\"\nm = 5", "");
        let rows = alpha_sweep(&s, &[0.5, 2.9]).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].alpha, 0.5);
        assert_eq!(rows[5].alpha, 2.9);
        let single = run_experiment(&s, rows[3].result.replicate).unwrap();
        assert_eq!(single.report, rows[3].result.report);
        assert!(alpha_sweep(&spec("kind = \"acmtm\"\nm = 5", ""), &[1.0]).is_err());
    }
}
