//! The run configuration: one JSON document per run, overridden by flags.

use std::path::{Path, PathBuf};

use greedy_widths_core::verify::{LogBase, REPORT_TOL};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: String,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Relative tolerance of the bound comparisons.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub example: ExampleSuite,
    #[serde(default)]
    pub thm31: Thm31Suite,
    #[serde(default)]
    pub operators: OperatorSuite,
    #[serde(default)]
    pub trace31: TraceSuite,
    #[serde(default)]
    pub commands: CommandParams,
}

fn default_tol() -> f64 {
    REPORT_TOL
}

/// The scaled canonical basis {(k+1)^{−α} e_k} in ℓ_q^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExampleSuite {
    pub alphas: Vec<f64>,
    pub qs: Vec<f64>,
    pub m: usize,
    /// Greedy steps; `None` runs all m.
    pub n_max: Option<usize>,
}

impl Default for ExampleSuite {
    fn default() -> Self {
        ExampleSuite {
            alphas: vec![0.5, 1.0, 1.5],
            qs: vec![3.0, 4.0, 8.0],
            m: 64,
            n_max: None,
        }
    }
}

/// Power-law bound on the scaled basis (ℓ_q) and on a rotated Euclidean copy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thm31Suite {
    pub alphas: Vec<f64>,
    pub qs: Vec<f64>,
    pub m: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub c0: f64,
    /// Dimension of the rotated Euclidean instance; 0 skips it.
    pub hilbert_dim: usize,
    pub hilbert_alpha: f64,
}

impl Default for Thm31Suite {
    fn default() -> Self {
        Thm31Suite {
            alphas: vec![0.5, 1.0, 1.5],
            qs: vec![3.0, 4.0, 8.0],
            m: 64,
            n_min: 2,
            n_max: 32,
            c0: 1.0,
            hilbert_dim: 16,
            hilbert_alpha: 1.0,
        }
    }
}

/// Operator instances shared by the thm32, cor35 and thm2n suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSuite {
    /// Random Gaussian operators ℓ₂^m → ℓ₂^m.
    pub count: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub sphere_samples: usize,
    pub n_max: usize,
    /// Diagonal operators ℓ₂^m → ℓ_q^m.
    pub alphas: Vec<f64>,
    pub qs: Vec<f64>,
    pub diagonal_dim: usize,
    pub restarts: usize,
}

impl Default for OperatorSuite {
    fn default() -> Self {
        OperatorSuite {
            count: 20,
            min_dim: 4,
            max_dim: 8,
            sphere_samples: 4096,
            n_max: 4,
            alphas: vec![0.5, 1.0, 1.5],
            qs: vec![3.0, 4.0, 8.0],
            diagonal_dim: 16,
            restarts: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSuite {
    pub n: usize,
    pub hilbert_dim: usize,
    pub hilbert_points: usize,
    pub hilbert_s: f64,
    pub alpha: f64,
    pub q: f64,
    pub m: usize,
    pub restarts: usize,
    pub ellipsoid_samples: usize,
}

impl Default for TraceSuite {
    fn default() -> Self {
        TraceSuite {
            n: 3,
            hilbert_dim: 12,
            hilbert_points: 48,
            hilbert_s: 1.0,
            alpha: 0.5,
            q: 4.0,
            m: 32,
            restarts: 4,
            ellipsoid_samples: 2000,
        }
    }
}

/// Effort of the single-purpose subcommands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommandParams {
    pub n_max: usize,
    pub restarts: usize,
    pub gamma_budget: usize,
    pub ellipsoid_samples: usize,
}

impl Default for CommandParams {
    fn default() -> Self {
        CommandParams {
            n_max: 8,
            restarts: 4,
            gamma_budget: 400,
            ellipsoid_samples: 2000,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION.into(),
            seed: 0,
            threads: None,
            tol: REPORT_TOL,
            log_base: LogBase::E,
            format: Format::Json,
            out: None,
            example: ExampleSuite::default(),
            thm31: Thm31Suite::default(),
            operators: OperatorSuite::default(),
            trace31: TraceSuite::default(),
            commands: CommandParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunConfig::from_json(&text, path)
    }

    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("the config serializes");
        s.push('\n');
        s
    }

    /// The settings that determine the outputs, without thread count or output path.
    pub fn recorded(&self) -> RunConfig {
        RunConfig {
            threads: None,
            out: None,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version {:?} is not supported (expected {SCHEMA_VERSION:?})",
                self.schema_version
            )));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(CliError::config("tol must be a finite nonnegative number"));
        }
        if self.threads == Some(0) {
            return Err(CliError::config("threads must be positive"));
        }
        let ex = &self.example;
        if ex.alphas.is_empty() || ex.qs.is_empty() {
            return Err(CliError::config(
                "example needs at least one alpha and one q",
            ));
        }
        if ex.n_max.is_some_and(|n| n == 0 || n > ex.m) {
            return Err(CliError::config("example.n_max must lie in 1..=m"));
        }
        let t = &self.thm31;
        if t.n_min < 2 || t.n_min > t.n_max {
            return Err(CliError::config("thm31 needs 2 <= n_min <= n_max"));
        }
        if t.n_max >= t.m {
            return Err(CliError::config("thm31.n_max must be below m"));
        }
        let o = &self.operators;
        if o.min_dim == 0 || o.min_dim > o.max_dim {
            return Err(CliError::config("operators needs 1 <= min_dim <= max_dim"));
        }
        if o.n_max == 0 {
            return Err(CliError::config("operators.n_max must be positive"));
        }
        if o.sphere_samples == 0 || o.sphere_samples % 2 == 1 {
            return Err(CliError::config(
                "operators.sphere_samples must be positive and even",
            ));
        }
        let tr = &self.trace31;
        if tr.n == 0 || tr.n > 10 {
            return Err(CliError::config("trace31.n must lie in 1..=10"));
        }
        Ok(())
    }
}
