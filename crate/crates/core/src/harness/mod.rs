//! Configuration-driven experiments: parsing, running replicates and
//! writing CSV artifacts.

mod compare;
mod config;
mod output;
mod runner;

pub use compare::{compare_reports, write_comparison, ComparisonInput, ComparisonRow};
pub use config::{
    build_target, ExperimentSpec, MixturePreset, RegionSpec, SamplerKind, SamplerPlan, SamplerSpec, TargetSpec,
    DEFAULT_THIN,
};
pub use output::{
    aggregate, mean_grid, mean_tables, replicate_dir, write_adaptation_log, write_aggregate, write_alpha_sweep,
    write_final_grid, write_manifest, write_replicate, write_replicate_report, write_summary, write_tables,
    AggregateRow,
};
pub use runner::{
    alpha_sweep, run_chain, run_experiment, run_replicate_outcomes, run_replicates, run_with_plan, AlphaSweepRow,
    ChainOutput, ReplicateOutcome, ReplicateReport, ReplicateResult, COIN_STREAM_FLAG,
};

use std::path::Path;

use crate::error::{Error, Result};

/// Reads and validates a spec file.
pub fn parse_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { path: path.to_path_buf(), message: e.to_string() })?;
    ExperimentSpec::from_toml_str(&text, path)
}
