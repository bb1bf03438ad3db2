//! TOML experiment description.
//!
//! Coordinates and proposals are numbered from 1 in config files and CSV
//! output, and from 0 in the library API.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::adaptation::DEFAULT_BETA;
use crate::error::{Error, Result};
use crate::kernels::{KernelConfig, ScaleBounds, ScaleGrid, DEFAULT_ALPHA};
use crate::targets::{
    self, load_dyestuff, make_banana, make_gaussian_mixture, make_vcm, BananaSpec, GaussianMixtureSpec, SupportBox,
    TargetModel, VcmSpec, DEFAULT_SUPPORT,
};

/// Default thinning stride of persisted traces.
pub const DEFAULT_THIN: usize = 10;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub target: TargetSpec,
    pub sampler: SamplerSpec,
    pub iterations: usize,
    /// Defaults to half of `iterations`.
    pub burn_in: Option<usize>,
    #[serde(default = "one")]
    pub replicates: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    pub initial: Option<Vec<f64>>,
    pub region: Option<RegionSpec>,
    pub alpha_sweep: Option<Vec<f64>>,
    /// Worker threads for replicates; defaults to the machine's parallelism.
    pub threads: Option<usize>,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default)]
    pub full_trace: bool,
    /// When false, wall times are recorded as zero so every output file is
    /// reproducible byte for byte.
    #[serde(default = "yes")]
    pub timing: bool,
    /// Directory relative paths inside the spec resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

fn default_thin() -> usize {
    DEFAULT_THIN
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MixturePreset {
    Mixture2,
    Mixture4,
    Mixture20,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    GaussianMixture {
        preset: Option<MixturePreset>,
        weights: Option<Vec<f64>>,
        means: Option<Vec<Vec<f64>>>,
        variances: Option<Vec<Vec<f64>>>,
        support: Option<f64>,
    },
    Banana {
        b: f64,
        dim: usize,
        support: Option<f64>,
    },
    Vcm {
        data_file: Option<PathBuf>,
        a1: Option<f64>,
        b1: Option<f64>,
        a2: Option<f64>,
        b2: Option<f64>,
        mu0: Option<f64>,
        sigma0_sq: Option<f64>,
        support: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Cmh,
    Acmh,
    MixtureCmh,
    Cmtm,
    Acmtm,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Cmh => "cmh",
            SamplerKind::Acmh => "acmh",
            SamplerKind::MixtureCmh => "mixture_cmh",
            SamplerKind::Cmtm => "cmtm",
            SamplerKind::Acmtm => "acmtm",
        }
    }

    fn uses_grid(&self) -> bool {
        matches!(self, SamplerKind::MixtureCmh | SamplerKind::Cmtm | SamplerKind::Acmtm)
    }
}

/// Sampler selection. Grid samplers take either `m` (generic grid
/// `2^(j-1-floor(m/2))`) or an explicit `scales` row shared by all
/// coordinates; single-proposal samplers take `scale`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub m: Option<usize>,
    pub scales: Option<Vec<f64>>,
    pub scale: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<u64>,
    pub batch: Option<u64>,
    pub epsilon: Option<f64>,
    pub upper: Option<f64>,
}

/// Splits frequency tables by `x[coordinate] >= threshold` (1-based).
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub coordinate: usize,
    pub threshold: f64,
}

impl RegionSpec {
    pub fn contains(&self, x: &[f64]) -> bool {
        x[self.coordinate - 1] >= self.threshold
    }
}

/// A validated sampler ready to run.
#[derive(Clone, Debug, PartialEq)]
pub enum SamplerPlan {
    Cmh { scales: Vec<f64> },
    Acmh { scales: Vec<f64>, batch: u64, bounds: ScaleBounds },
    MixtureCmh { grid: ScaleGrid },
    Cmtm { grid: ScaleGrid, kernel: KernelConfig },
    Acmtm { grid: ScaleGrid, kernel: KernelConfig, beta: u64, bounds: ScaleBounds },
}

impl SamplerPlan {
    /// Proposals per coordinate as recorded in update records.
    pub fn m(&self) -> usize {
        match self {
            SamplerPlan::Cmh { .. } | SamplerPlan::Acmh { .. } => 1,
            SamplerPlan::MixtureCmh { grid } | SamplerPlan::Cmtm { grid, .. } | SamplerPlan::Acmtm { grid, .. } => {
                grid.m()
            }
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        match self {
            SamplerPlan::Cmtm { grid, .. } => {
                Ok(SamplerPlan::Cmtm { grid: grid.clone(), kernel: KernelConfig::new(alpha)? })
            }
            _ => Err(Error::invalid("alpha sweeps need a cmtm sampler")),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let mut spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| Error::Config { path: path.to_path_buf(), message: e.to_string() })?;
        spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        spec.validate().map_err(|e| Error::Config { path: path.to_path_buf(), message: e.to_string() })?;
        Ok(spec)
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.iterations / 2)
    }

    /// Structural checks plus building the target and sampler once.
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.burn_in() >= self.iterations {
            return Err(Error::invalid(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations,
                self.burn_in()
            )));
        }
        if self.iterations - self.burn_in() < 10 {
            return Err(Error::invalid("at least 10 post-burn-in sweeps are needed for diagnostics"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be >= 1"));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be >= 1"));
        }
        if let Some(alphas) = &self.alpha_sweep {
            if self.sampler.kind != SamplerKind::Cmtm {
                return Err(Error::invalid("alpha_sweep needs sampler.kind = \"cmtm\""));
            }
            for a in alphas {
                KernelConfig::new(*a)?;
            }
        }
        let target = self.build_target()?;
        if let Some(r) = &self.region {
            if r.coordinate == 0 || r.coordinate > target.dim() || !r.threshold.is_finite() {
                return Err(Error::invalid(format!(
                    "region coordinate must be in 1..={} with a finite threshold",
                    target.dim()
                )));
            }
        }
        self.build_sampler(target.dim())?;
        Ok(())
    }

    pub fn build_target(&self) -> Result<TargetModel> {
        let model = build_target(&self.target, &self.base_dir)?;
        match &self.initial {
            Some(x) => model.with_initial(x.clone()),
            None => Ok(model),
        }
    }

    pub fn build_sampler(&self, d: usize) -> Result<SamplerPlan> {
        self.sampler.plan(d)
    }
}

impl SamplerSpec {
    pub fn plan(&self, d: usize) -> Result<SamplerPlan> {
        let kind = self.kind;
        let name = kind.as_str();
        let reject = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::invalid(format!("sampler field '{field}' does not apply to {name}")))
            } else {
                Ok(())
            }
        };
        let default = ScaleBounds::default();
        let bounds = ScaleBounds::new(self.epsilon.unwrap_or(default.epsilon), self.upper.unwrap_or(default.upper))?;
        if kind.uses_grid() {
            reject("scale", self.scale.is_some())?;
            reject("batch", self.batch.is_some())?;
        } else {
            reject("m", self.m.is_some())?;
            reject("scales", self.scales.is_some())?;
            reject("alpha", self.alpha.is_some())?;
            reject("beta", self.beta.is_some())?;
        }
        if kind != SamplerKind::Acmtm {
            reject("beta", self.beta.is_some())?;
        }
        if kind != SamplerKind::Acmh {
            reject("batch", self.batch.is_some())?;
        }
        if matches!(kind, SamplerKind::MixtureCmh) {
            reject("alpha", self.alpha.is_some())?;
        }

        let grid = || -> Result<ScaleGrid> {
            match (&self.scales, self.m) {
                (Some(row), m) => {
                    if m.is_some_and(|m| m != row.len()) {
                        return Err(Error::invalid("sampler.m disagrees with the length of sampler.scales"));
                    }
                    ScaleGrid::uniform(d, row, bounds)
                }
                (None, Some(m)) => ScaleGrid::generic(d, m, bounds),
                (None, None) => Err(Error::invalid(format!("{name} needs either m or scales"))),
            }
        };
        let kernel = || KernelConfig::new(self.alpha.unwrap_or(DEFAULT_ALPHA));
        let single = || -> Result<Vec<f64>> {
            let s = self.scale.unwrap_or(1.0);
            if !bounds.contains(s) {
                return Err(Error::invalid(format!("scale {s} lies outside [{}, {}]", bounds.epsilon, bounds.upper)));
            }
            Ok(vec![s; d])
        };
        Ok(match kind {
            SamplerKind::Cmh => SamplerPlan::Cmh { scales: single()? },
            SamplerKind::Acmh => {
                let batch = self.batch.unwrap_or(100);
                if batch == 0 {
                    return Err(Error::invalid("acmh batch must be >= 1"));
                }
                SamplerPlan::Acmh { scales: single()?, batch, bounds }
            }
            SamplerKind::MixtureCmh => SamplerPlan::MixtureCmh { grid: grid()? },
            SamplerKind::Cmtm => SamplerPlan::Cmtm { grid: grid()?, kernel: kernel()? },
            SamplerKind::Acmtm => {
                let beta = self.beta.unwrap_or(DEFAULT_BETA);
                if beta == 0 {
                    return Err(Error::invalid("acmtm beta must be >= 1"));
                }
                SamplerPlan::Acmtm { grid: grid()?, kernel: kernel()?, beta, bounds }
            }
        })
    }
}

fn support_box(dim: usize, half_width: Option<f64>) -> Result<SupportBox> {
    SupportBox::symmetric(dim, half_width.unwrap_or(DEFAULT_SUPPORT))
}

pub fn build_target(spec: &TargetSpec, base_dir: &Path) -> Result<TargetModel> {
    match spec {
        TargetSpec::GaussianMixture { preset, weights, means, variances, support } => {
            let spec = match (preset, weights, means, variances) {
                (Some(p), None, None, None) => match p {
                    MixturePreset::Mixture2 => targets::mixture2(),
                    MixturePreset::Mixture4 => targets::mixture4(),
                    MixturePreset::Mixture20 => targets::mixture20(),
                },
                (None, Some(w), Some(m), Some(v)) => {
                    GaussianMixtureSpec { weights: w.clone(), means: m.clone(), variances: v.clone() }
                }
                _ => {
                    return Err(Error::invalid(
                        "gaussian_mixture takes either a preset or all of weights, means and variances",
                    ))
                }
            };
            spec.validate()?;
            make_gaussian_mixture(&spec, support_box(spec.dim(), *support)?)
        }
        TargetSpec::Banana { b, dim, support } => {
            make_banana(&BananaSpec { b: *b, dim: *dim }, support_box((*dim).max(1), *support)?)
        }
        TargetSpec::Vcm { data_file, a1, b1, a2, b2, mu0, sigma0_sq, support } => {
            let mut vcm = VcmSpec::dyestuff();
            if let Some(path) = data_file {
                vcm.data = load_dyestuff(&base_dir.join(path))?;
            }
            let set = |slot: &mut f64, v: &Option<f64>| {
                if let Some(v) = v {
                    *slot = *v;
                }
            };
            set(&mut vcm.a1, a1);
            set(&mut vcm.b1, b1);
            set(&mut vcm.a2, a2);
            set(&mut vcm.b2, b2);
            set(&mut vcm.mu0, mu0);
            set(&mut vcm.sigma0_sq, sigma0_sq);
            make_vcm(&vcm, support_box(vcm.dim(), *support)?)
        }
    }
}
