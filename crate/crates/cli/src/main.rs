use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acmtm::harness::{
    self, alpha_sweep, compare_reports, parse_spec, replicate_dir, run_experiment, run_replicate_outcomes,
    write_alpha_sweep, write_comparison, write_manifest, write_replicate, write_replicate_report, write_summary,
    ComparisonInput, ExperimentSpec,
};
use acmtm::Error;
use clap::{Args, Parser, Subcommand};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

const PLOT_SCRIPT: &str = include_str!("../assets/plot_csv.py");

/// Component-wise multiple-try Metropolis experiments.
#[derive(Parser)]
#[command(name = "acmtm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single replicate and write its CSVs into the output directory.
    Run {
        spec: PathBuf,
        /// Replicate id, which selects the random stream.
        #[arg(long, default_value_t = 0)]
        replicate: u64,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every replicate of a spec and write summary and aggregate CSVs.
    Replicates {
        spec: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a cmtm spec once per alpha.
    AlphaSweep {
        spec: PathBuf,
        /// Comma-separated alphas; defaults to the spec's alpha_sweep list.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        alphas: Vec<f64>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Compare ESS across replicate sets (summary.csv files or their directories).
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Comma-separated labels; defaults to directory names.
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        /// Output file.
        #[arg(long, default_value = "comparison.csv")]
        out: PathBuf,
    },
    /// Parse and validate a spec without running it.
    Validate { spec: PathBuf },
}

#[derive(Args)]
struct RunOpts {
    /// Overrides base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides outputs.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Keep every n-th state in trace.csv.
    #[arg(long)]
    thin: Option<usize>,
    /// Write thinned traces.
    #[arg(long)]
    full_trace: bool,
    /// Record zero wall times so outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

fn load(path: &Path, opts: &RunOpts) -> acmtm::Result<ExperimentSpec> {
    let mut spec = parse_spec(path)?;
    if let Some(seed) = opts.seed {
        spec.base_seed = seed;
    }
    if let Some(dir) = &opts.out_dir {
        spec.outputs = dir.clone();
    }
    if opts.threads.is_some() {
        spec.threads = opts.threads;
    }
    if let Some(thin) = opts.thin {
        spec.thin = thin;
    }
    spec.full_trace |= opts.full_trace;
    spec.timing &= !opts.no_timing;
    spec.validate().map_err(|e| Error::Config { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(spec)
}

fn write_plot_script(dir: &Path) -> acmtm::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("plot_csv.py"), PLOT_SCRIPT)?;
    Ok(())
}

fn replicates(spec: &ExperimentSpec) -> acmtm::Result<()> {
    let outcome = run_replicate_outcomes(spec)?;
    let statuses: Vec<_> =
        outcome.results.iter().map(|(id, r)| (*id, r.as_ref().map(|_| ()).map_err(|e| e.to_string()))).collect();
    write_manifest(&spec.outputs.join("manifest.csv"), &statuses)?;
    if statuses.iter().any(|s| s.1.is_err()) {
        let done: Vec<_> = outcome.results.iter().filter_map(|(_, r)| r.as_ref().ok()).cloned().collect();
        for r in &done {
            write_replicate(&spec.outputs.join(replicate_dir(r.replicate)), r)?;
        }
        if !done.is_empty() {
            write_summary(&spec.outputs.join("summary.csv"), &done)?;
        }
        return outcome.into_report().map(|_| ());
    }
    let report = outcome.into_report()?;
    write_replicate_report(&spec.outputs, &report)?;
    write_plot_script(&spec.outputs)?;
    for row in harness::aggregate(&report) {
        println!(
            "{:<12} min {:.4} median {:.4} mean {:.4} max {:.4}",
            row.metric, row.min, row.median, row.mean, row.max
        );
    }
    Ok(())
}

fn summary_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("summary.csv")
    } else {
        p.to_path_buf()
    }
}

fn default_label(p: &Path) -> String {
    let dir = if p.is_dir() { Some(p) } else { p.parent() };
    dir.and_then(Path::file_name).map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string())
}

fn execute(cli: Cli) -> acmtm::Result<()> {
    match cli.command {
        Command::Validate { spec } => {
            let spec = parse_spec(&spec)?;
            let target = spec.build_target()?;
            println!(
                "ok: {} (d = {}), sampler {}, {} iterations, burn-in {}, {} replicate(s)",
                target.label(),
                target.dim(),
                spec.sampler.kind.as_str(),
                spec.iterations,
                spec.burn_in(),
                spec.replicates
            );
        }
        Command::Run { spec: path, replicate, opts } => {
            let spec = load(&path, &opts)?;
            let result = run_experiment(&spec, replicate)?;
            write_replicate(&spec.outputs, &result)?;
            println!("replicate {replicate}: asj {:.6}, wall time {:.3}s", result.report.asj, result.wall_time);
        }
        Command::Replicates { spec: path, opts } => replicates(&load(&path, &opts)?)?,
        Command::AlphaSweep { spec: path, alphas, opts } => {
            let spec = load(&path, &opts)?;
            let alphas = if alphas.is_empty() { spec.alpha_sweep.clone().unwrap_or_default() } else { alphas };
            if alphas.is_empty() {
                return Err(Error::Config {
                    path,
                    message: "no alphas given on the command line or in alpha_sweep".into(),
                });
            }
            let rows = alpha_sweep(&spec, &alphas)?;
            write_alpha_sweep(&spec.outputs, &rows)?;
            write_plot_script(&spec.outputs)?;
            for r in &rows {
                println!("alpha {:<6} replicate {} asj {:.6}", r.alpha, r.result.replicate, r.result.report.asj);
            }
        }
        Command::Compare { reports, labels, out } => {
            if !labels.is_empty() && labels.len() != reports.len() {
                return Err(Error::InvalidParameter(format!("{} labels for {} reports", labels.len(), reports.len())));
            }
            let inputs = reports
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let label = labels.get(i).cloned().unwrap_or_else(|| default_label(p));
                    ComparisonInput::from_summary_csv(label, &summary_path(p))
                })
                .collect::<acmtm::Result<Vec<_>>>()?;
            let rows = compare_reports(&inputs)?;
            write_comparison(&out, &rows)?;
            if let Some(dir) = out.parent() {
                write_plot_script(if dir.as_os_str().is_empty() { Path::new(".") } else { dir })?;
            }
            for r in &rows {
                println!(
                    "x_{:<3} {:<16} ess {:>10.1} ({:.3}x)  ess/s {:>12.1} ({:.3}x)",
                    r.coordinate + 1,
                    r.label,
                    r.ess,
                    r.ess_ratio,
                    r.ess_per_second,
                    r.ess_per_second_ratio
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_RUNTIME })
        }
    }
}
