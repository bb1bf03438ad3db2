//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use acmtm::adaptation::{adaptation_probability, respace_log2, AdaptationState};
use acmtm::diagnostics::autocorrelation_time;
use acmtm::harness::{
    alpha_sweep, run_experiment, run_replicates, write_replicate_report, ExperimentSpec, ReplicateReport,
};
use acmtm::kernels::{cmtm_coordinate_update, cmtm_sweep, KernelConfig, ScaleBounds, ScaleGrid};
use acmtm::rng::RngStream;
use acmtm::targets::{
    make_banana, make_gaussian_mixture, mixture4, BananaSpec, GaussianMixtureSpec, SupportBox, TargetModel,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spec(text: &str) -> ExperimentSpec {
    ExperimentSpec::from_toml_str(text, Path::new("acceptance.toml")).expect("acceptance spec must parse")
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard error of the mean of independent replicate values.
fn std_error(v: &[f64]) -> f64 {
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (var / v.len() as f64).sqrt()
}

fn std_normal() -> TargetModel {
    let spec = GaussianMixtureSpec { weights: vec![1.0], means: vec![vec![0.0]], variances: vec![vec![1.0]] };
    make_gaussian_mixture(&spec, SupportBox::symmetric(1, 1e6).unwrap()).unwrap()
}

fn mean_of(report: &ReplicateReport, f: impl Fn(&acmtm::harness::ReplicateResult) -> f64) -> f64 {
    mean(&report.results.iter().map(f).collect::<Vec<_>>())
}

fn in_range(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

fn mixture4_spec(sampler: &str, replicates: u64, seed: u64) -> ExperimentSpec {
    spec(&format!(
        r#"
iterations = 10000
burn_in = 5000
replicates = {replicates}
base_seed = {seed}
timing = false

[target]
kind = "gaussian_mixture"
preset = "mixture4"

[sampler]
{sampler}
"#
    ))
}

/// CMTM with one proposal accepts with the plain Metropolis ratio.
fn criterion_1() -> Outcome {
    let target = std_normal();
    let mut worst: f64 = 0.0;
    let mut moves = 0;
    for (i, alpha) in [0.1, 1.0, 2.9, 15.0].into_iter().enumerate() {
        let cfg = KernelConfig::new(alpha).unwrap();
        let mut rng = RngStream::new(101, i as u64);
        let mut x = [0.3];
        for _ in 0..2500 {
            let before = x[0];
            let mut replay = rng.clone();
            let y = before + 1.5 * replay.standard_normal();
            let rec = cmtm_coordinate_update(&target, &mut x, 0, &[1.5], &cfg, &mut rng).unwrap();
            let mh = (-(y * y - before * before) / 2.0).exp().min(1.0);
            worst = worst.max((rec.acceptance_prob - mh).abs());
            moves += 1;
        }
    }
    outcome(worst <= 1e-12, format!("{moves} moves, max |rho - MH ratio| = {worst:.2e} (tol 1e-12)"))
}

/// Non-adaptive CMTM leaves the standard normal invariant.
fn criterion_2() -> Outcome {
    let target = std_normal();
    let grid = ScaleGrid::uniform(1, &[0.5, 1.0, 2.0], ScaleBounds::default()).unwrap();
    let cfg = KernelConfig::new(2.9).unwrap();
    let mut rng = RngStream::new(2, 0);
    let mut x = vec![0.0];
    let sweeps = 200_000;
    let mut kept = Vec::with_capacity(sweeps / 2);
    for t in 0..sweeps {
        cmtm_sweep(&target, &mut x, &grid, &cfg, &mut rng).unwrap();
        if t >= sweeps / 2 {
            kept.push(x[0]);
        }
    }
    let n = kept.len() as f64;
    let m = mean(&kept);
    let var = kept.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    let tau = autocorrelation_time(&kept).unwrap();
    let se_mean = (var * tau / n).sqrt();
    let squares: Vec<f64> = kept.iter().map(|v| v * v).collect();
    let sq_mean = mean(&squares);
    let sq_var = squares.iter().map(|v| (v - sq_mean).powi(2)).sum::<f64>() / (n - 1.0);
    let tau_sq = autocorrelation_time(&squares).unwrap();
    let se_var = (sq_var * tau_sq / n).sqrt();
    let pass = m.abs() <= 3.0 * se_mean && (var - 1.0).abs() <= 3.0 * se_var;
    outcome(
        pass,
        format!(
            "mean {m:.4} (3 SE = {:.4}), variance {var:.4} (3 SE = {:.4}), tau {tau:.2}",
            3.0 * se_mean,
            3.0 * se_var
        ),
    )
}

/// ASJ peaks at moderate alpha on the 2-d mixture.
fn criterion_3() -> Outcome {
    let s = spec(
        r#"
iterations = 100000
burn_in = 50000
replicates = 5
base_seed = 3
timing = false

[target]
kind = "gaussian_mixture"
preset = "mixture2"

[sampler]
kind = "cmtm"
scales = [1.0, 2.0, 4.0, 8.0, 16.0]
"#,
    );
    let alphas = [0.1, 1.0, 2.9, 8.0, 15.0];
    let rows = alpha_sweep(&s, &alphas).unwrap();
    let mut by_alpha: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &rows {
        by_alpha.entry(format!("{}", r.alpha)).or_default().push(r.result.report.asj);
    }
    let stats = |a: f64| {
        let v = &by_alpha[&format!("{a}")];
        (mean(v), std_error(v))
    };
    let (best, best_se) = stats(2.9);
    let mut pass = true;
    let mut parts = vec![];
    for a in alphas {
        let (m, se) = stats(a);
        parts.push(format!("{a}: {m:.4}"));
        if a == 0.1 || a == 15.0 {
            pass &= best - m > 3.0 * (best_se.powi(2) + se.powi(2)).sqrt();
        }
    }
    outcome(pass, format!("mean ASJ by alpha {{{}}}", parts.join(", ")))
}

/// CMTM vs mixture CMH on the 4-d mixture.
fn criterion_4() -> Outcome {
    let cmtm = run_replicates(&mixture4_spec("kind = \"cmtm\"\nm = 20", 20, 4)).unwrap();
    let mix = run_replicates(&mixture4_spec("kind = \"mixture_cmh\"\nm = 20", 20, 4)).unwrap();
    let (asj_c, asj_m) = (mean_of(&cmtm, |r| r.report.asj), mean_of(&mix, |r| r.report.asj));
    let (act_c, act_m) = (mean_of(&cmtm, |r| r.report.act[2]), mean_of(&mix, |r| r.report.act[2]));
    let pass = in_range(asj_c, 5.0, 8.3)
        && in_range(asj_m, 0.45, 0.80)
        && in_range(act_c, 1.2, 2.5)
        && in_range(act_m, 18.0, 42.0);
    outcome(
        pass,
        format!(
            "ASJ cmtm {asj_c:.3} in [5.0, 8.3], mixture-cmh {asj_m:.3} in [0.45, 0.80]; \
             ACT_3 cmtm {act_c:.3} in [1.2, 2.5], mixture-cmh {act_m:.2} in [18, 42]"
        ),
    )
}

/// ACMTM on the 4-d mixture.
fn criterion_5() -> Outcome {
    let report = run_replicates(&mixture4_spec("kind = \"acmtm\"\nm = 20", 20, 5)).unwrap();
    let asj = mean_of(&report, |r| r.report.asj);
    let act4 = mean_of(&report, |r| r.report.act[3]);
    let (d, m) = (report.dim, report.m);
    let mut lo_freq = f64::INFINITY;
    let mut hi_freq = f64::NEG_INFINITY;
    for k in 0..d {
        for j in 0..m {
            let f = mean_of(&report, |r| r.report.tables.selection[k][j]);
            lo_freq = lo_freq.min(f);
            hi_freq = hi_freq.max(f);
        }
    }
    let endpoint_ok = |v: f64, centre: f64| v >= centre / 4.0 && v <= centre * 4.0;
    let grids_ok = report
        .results
        .iter()
        .filter(|r| endpoint_ok(r.final_grid.get(3, 0), 0.125) && endpoint_ok(r.final_grid.get(3, m - 1), 0.5))
        .count();
    let sigma1 = mean_of(&report, |r| r.final_grid.get(3, 0));
    let sigma20 = mean_of(&report, |r| r.final_grid.get(3, m - 1));
    let pass = in_range(asj, 8.0, 12.0)
        && in_range(act4, 1.0, 2.0)
        && lo_freq >= 0.02
        && hi_freq <= 0.09
        && grids_ok == report.results.len();
    outcome(
        pass,
        format!(
            "ASJ {asj:.3} in [8, 12]; ACT_4 {act4:.3} in [1, 2]; selection freq range [{lo_freq:.4}, {hi_freq:.4}] \
             within [0.02, 0.09]; coordinate-4 endpoints within 4x of (0.125, 0.5) in {grids_ok}/{} replicates \
             (mean {sigma1:.4}, {sigma20:.4})",
            report.results.len()
        ),
    )
}

/// Region-conditioned selection favours smaller scales near the narrow mode.
fn criterion_6() -> Outcome {
    let mut s = mixture4_spec("kind = \"cmtm\"\nm = 20", 1, 6);
    s.region = Some(acmtm::harness::RegionSpec { coordinate: 2, threshold: 8.0 });
    let r = run_experiment(&s, 0).unwrap();
    let region = r.report.region.unwrap();
    let (inside, outside) = (region.inside.mode(2), region.outside.mode(2));
    match (inside, outside) {
        (Some(i), Some(o)) => {
            let (si, so) = (r.final_grid.get(2, i), r.final_grid.get(2, o));
            outcome(si < so, format!("coordinate-3 mode sigma {si} in X_2 >= 8 vs {so} in X_2 < 8"))
        }
        _ => outcome(false, "a region was never visited"),
    }
}

/// ACT estimator against closed-form AR(1) and white noise.
fn criterion_7() -> Outcome {
    let mut rng = RngStream::new(7, 0);
    let n = 1_000_000;
    let phi: f64 = 0.5;
    let innov = (1.0 - phi * phi).sqrt();
    let mut x = rng.standard_normal();
    let ar: Vec<f64> = (0..n)
        .map(|_| {
            x = phi * x + innov * rng.standard_normal();
            x
        })
        .collect();
    let noise: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
    let tau_ar = autocorrelation_time(&ar).unwrap();
    let tau_wn = autocorrelation_time(&noise).unwrap();
    let pass = (tau_ar - 3.0).abs() <= 0.05 * 3.0 && (tau_wn - 1.0).abs() <= 0.1;
    outcome(pass, format!("AR(1) tau {tau_ar:.4} (3.0 +- 5%), white noise tau {tau_wn:.4} (1.0 +- 10%)"))
}

/// Adaptation probabilities, respacing and bounds under stress.
fn criterion_8() -> Outcome {
    let mut prob_err: f64 = 0.0;
    for a in [1u64, 2, 101, 10_000] {
        let geometric = ((a - 1) as f64 * 0.99f64.ln()).exp();
        let root = 1.0 / (a as f64).sqrt();
        let expected = geometric.max(root);
        let got = adaptation_probability(a).unwrap();
        prob_err = prob_err.max((got - expected).abs() / expected);
    }
    let respaced = respace_log2(1.0, 16.0, 5).unwrap();
    let respace_ok = respaced == vec![1.0, 2.0, 4.0, 8.0, 16.0];

    let bounds = ScaleBounds::default();
    let targets = [
        make_gaussian_mixture(&mixture4(), SupportBox::symmetric(4, 1e6).unwrap()).unwrap(),
        make_banana(&BananaSpec { b: 0.01, dim: 4 }, SupportBox::symmetric(4, 1e6).unwrap()).unwrap(),
    ];
    let mut violations = 0usize;
    let mut sweeps = 0usize;
    for (i, target) in targets.iter().enumerate() {
        let row = respace_log2(bounds.epsilon, bounds.upper, 5).unwrap();
        let mut grid = ScaleGrid::uniform(4, &row, bounds).unwrap();
        let cfg = KernelConfig::default();
        let mut rng = RngStream::new(8, i as u64);
        let coin = RngStream::new(8, (i as u64) | (1 << 63));
        let mut state = AdaptationState::new(4, 5, 1, bounds, coin).unwrap();
        let mut x = target.initial_state().to_vec();
        for t in 1..=50_000u64 {
            let rec = cmtm_sweep(target, &mut x, &grid, &cfg, &mut rng).unwrap();
            state.record_sweep(&rec).unwrap();
            state.maybe_adapt(&mut grid, t).unwrap();
            if !grid.within(bounds) {
                violations += 1;
            }
            sweeps += 1;
        }
    }
    let pass = prob_err < 1e-12 && respace_ok && violations == 0;
    outcome(
        pass,
        format!(
            "P_a max rel err {prob_err:.1e}; respace_log2(1,16,5) = {respaced:?}; {violations} out-of-bounds grids \
             in {sweeps} adaptive sweeps (beta = 1, grid spanning [eps, L])"
        ),
    )
}

/// Application orderings: VCM, banana and the 20-d mixture.
fn criterion_9() -> Outcome {
    let app = |target: &str, sampler: &str, seed: u64| {
        run_replicates(&spec(&format!(
            r#"
iterations = 10000
burn_in = 5000
replicates = 20
base_seed = {seed}

[target]
{target}

[sampler]
{sampler}
"#
        )))
        .unwrap()
    };
    let vcm = "kind = \"vcm\"";
    let vcm_acmtm = app(vcm, "kind = \"acmtm\"\nm = 20", 91);
    let vcm_acmh = app(vcm, "kind = \"acmh\"", 91);
    let better =
        (0..9).filter(|&k| mean_of(&vcm_acmtm, |r| r.report.ess[k]) > mean_of(&vcm_acmh, |r| r.report.ess[k])).count();

    let banana = "kind = \"banana\"\nb = 0.01\ndim = 10";
    let ban_cmtm = app(banana, "kind = \"cmtm\"\nm = 30", 92);
    let ban_cmh = app(banana, "kind = \"cmh\"", 92);
    let ess_cmtm = mean_of(&ban_cmtm, |r| r.report.ess[0]);
    let ess_cmh = mean_of(&ban_cmh, |r| r.report.ess[0]);
    let per_sec = |rep: &ReplicateReport| mean_of(rep, |r| r.report.ess[0] / r.wall_time);
    let time_ratio = per_sec(&ban_cmtm) / per_sec(&ban_cmh);

    let mix20 = "kind = \"gaussian_mixture\"\npreset = \"mixture20\"";
    let m20_acmtm = app(mix20, "kind = \"acmtm\"\nm = 30", 93);
    let m20_acmh = app(mix20, "kind = \"acmh\"", 93);
    let (asj_a, asj_h) = (mean_of(&m20_acmtm, |r| r.report.asj), mean_of(&m20_acmh, |r| r.report.asj));

    let pass = better >= 5 && ess_cmtm >= 2.0 * ess_cmh && asj_a > asj_h;
    outcome(
        pass,
        format!(
            "(a) VCM acmtm ESS higher on {better}/9 coordinates; (b) banana ESS_1 cmtm {ess_cmtm:.1} vs cmh \
             {ess_cmh:.1} (ratio {:.1}, ESS/s ratio {time_ratio:.2} recorded only); (c) mixture20 ASJ acmtm \
             {asj_a:.3} vs acmh {asj_h:.3}",
            ess_cmtm / ess_cmh
        ),
    )
}

fn collect_files(dir: &Path, root: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, root, out);
        } else {
            out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
        }
    }
}

/// Re-running a spec reproduces every CSV byte for byte.
fn criterion_10() -> Outcome {
    let base = r#"
iterations = 3000
burn_in = 1000
replicates = 4
base_seed = 10
timing = false
full_trace = true
thin = 7
region = { coordinate = 2, threshold = 8.0 }

[target]
kind = "gaussian_mixture"
preset = "mixture4"

[sampler]
"#;
    let mut mismatched = Vec::new();
    let mut files = 0;
    for (name, sampler) in [("acmtm", "kind = \"acmtm\"\nm = 8\nbeta = 50"), ("acmh", "kind = \"acmh\"")] {
        let mut trees = Vec::new();
        for threads in [1, 3] {
            let dir = tempfile::tempdir().unwrap();
            let mut s = spec(&format!("{base}{sampler}\n"));
            s.threads = Some(threads);
            let report = run_replicates(&s).unwrap();
            write_replicate_report(dir.path(), &report).unwrap();
            let mut tree = BTreeMap::new();
            collect_files(dir.path(), dir.path(), &mut tree);
            trees.push(tree);
        }
        files += trees[0].len();
        if trees[0] != trees[1] {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty() && files > 0,
        format!("{files} CSV files compared across two runs (1 vs 3 threads); mismatched samplers: {mismatched:?}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("m=1 reduction", criterion_1),
        ("stationarity", criterion_2),
        ("alpha-sweep shape", criterion_3),
        ("4-d mixture, cmtm vs mixture-cmh", criterion_4),
        ("4-d mixture, acmtm", criterion_5),
        ("region-conditioned selection", criterion_6),
        ("ACT estimator oracle", criterion_7),
        ("adaptation schedule exactness", criterion_8),
        ("applications ordering", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {status} [{name}] {} ({:.1}s)", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
