use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use gkcs_core::{SuiteConfig, C64};
use serde::{Deserialize, Serialize};

/// Environment variable naming the directory used when `--out` is absent.
pub const OUT_DIR_ENV: &str = "GKCS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FormatArgs {
    /// Emit JSON
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV (default)
    #[arg(long)]
    pub csv: bool,
}

impl FormatArgs {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            Format::Csv
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StateArgs {
    /// Model spec, e.g. `infinite_well` or `morse:M=4`
    #[arg(long)]
    pub model: String,
    /// gk | dual | even | odd | cat-real | cat-imag
    #[arg(long, default_value = "gk")]
    pub family: String,
    /// Complex label as `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Relative tail mass allowed beyond the cutoff
    #[arg(long, default_value_t = 1e-14)]
    pub tail_tol: f64,
    /// Fixed cutoff instead of the automatic one
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub format: FormatArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recorded for reproducibility; no computation is random
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OpArgs {
    #[arg(long)]
    pub model: String,
    /// A | Adag | B | Bdag | S | T | H | D | V | acheck
    #[arg(long)]
    pub op: String,
    /// Use the dual-family variant (ε_n in place of e_n)
    #[arg(long)]
    pub dual: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Displacement label `re,im` (D and V only)
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Cutoff N; the matrix is (N+1)x(N+1)
    #[arg(long = "N", short = 'N')]
    pub cutoff: usize,
    #[command(flatten)]
    pub format: FormatArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// ⟨H⟩ against |z|² along a ray
    Action,
    /// Photon distribution at fixed z
    Distribution,
    /// Cat-state distribution against θ at fixed r, with the closed formula
    CatTheta,
    /// Overlap with the state at the first grid point, with the closed form
    Overlap,
    /// Series and closed-form normalization against x = |z|²
    Normalization,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: String,
    /// gk | dual | even | odd | cat-real | cat-imag
    #[arg(long, default_value = "dual")]
    pub family: String,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Fixed label `re,im` (distribution)
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Fixed modulus (cat-theta)
    #[arg(long)]
    pub r: Option<f64>,
    /// Radial grid start as a fraction of the convergence radius
    #[arg(long, default_value_t = 0.1)]
    pub r_min: f64,
    /// Radial grid end as a fraction of the convergence radius
    #[arg(long, default_value_t = 0.9)]
    pub r_max: f64,
    #[arg(long, default_value_t = 9)]
    pub points: usize,
    /// Phase of the ray for radial sweeps
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// θ samples on [0, π] for cat-theta
    #[arg(long, default_value_t = 13)]
    pub theta_points: usize,
    /// Stand-in radius for unbounded or finite-dimensional models
    #[arg(long, default_value_t = 3.0)]
    pub infinite_radius: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub tail_tol: f64,
    #[command(flatten)]
    pub format: FormatArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub model: String,
    /// gk | dual | even | odd
    #[arg(long, default_value = "gk")]
    pub family: String,
    /// Suite configuration (JSON); missing fields take their defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report path; defaults to standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress the per-check summary on stderr
    #[arg(long)]
    pub quiet: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Resolved suite configuration, embedded so reruns do not need the file
    #[arg(skip)]
    #[serde(default)]
    pub suite: Option<SuiteConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Task {
    State(StateArgs),
    Op(OpArgs),
    Sweep(SweepArgs),
    Verify(VerifyArgs),
}

/// Everything needed to regenerate an output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub task: Task,
    /// Actual destination; not part of the recorded configuration.
    #[serde(skip)]
    pub destination: Option<Option<PathBuf>>,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        Self { tool: "gkcs".into(), version: env!("CARGO_PKG_VERSION").into(), task, destination: None }
    }

    /// Overrides where output goes without touching the recorded `out`.
    pub fn set_out(&mut self, out: Option<PathBuf>) {
        self.destination = Some(out);
    }

    pub fn recorded_out(&self) -> Option<&PathBuf> {
        match &self.task {
            Task::State(a) => a.out.as_ref(),
            Task::Op(a) => a.out.as_ref(),
            Task::Sweep(a) => a.out.as_ref(),
            Task::Verify(a) => a.out.as_ref(),
        }
    }

    /// `--out`, else `$GKCS_OUT_DIR/<default_name>`, else standard output.
    pub fn output_path(&self, default_name: &str) -> Option<PathBuf> {
        if let Some(d) = &self.destination {
            return d.clone();
        }
        if let Some(p) = self.recorded_out() {
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(default_name))
    }

    pub fn to_json_line(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub fn parse_z(s: &str) -> anyhow::Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().with_context(|| format!("bad number `{t}` in z=`{s}`"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => bail!("z must be `re,im`, got `{s}`"),
    }
}

/// Pulls the embedded configuration out of a CSV (`# run_config: {...}`
/// header line) or JSON (`run_config` field) artifact.
pub fn read_embedded(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# run_config: ")) {
        return Ok(serde_json::from_str(line)?);
    }
    let value: serde_json::Value = serde_json::from_str(&text).context("artifact is neither tagged CSV nor JSON")?;
    let cfg = value.get("run_config").ok_or_else(|| anyhow!("no run_config in {}", path.display()))?;
    Ok(serde_json::from_value(cfg.clone())?)
}
