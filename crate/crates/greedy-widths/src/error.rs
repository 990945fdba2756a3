//! Errors of the command-line layer and their exit codes.

use std::path::PathBuf;

use serde::Serialize;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Exit code when every report passes or is inconclusive.
pub const EXIT_OK: i32 = 0;
/// Exit code when some report is a certified violation.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit code for configuration and IO errors.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("plot rendering failed: {0}")]
    Plot(String),

    #[error(transparent)]
    Core(#[from] greedy_widths_core::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// A failing proof-trace check is a certified failure; everything else is a setup error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(greedy_widths_core::Error::TraceFailure { .. }) => EXIT_VIOLATION,
            _ => EXIT_CONFIG,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Csv { .. } => "csv",
            CliError::Plot(_) => "plot",
            CliError::Core(_) => "core",
        }
    }

    pub fn to_json(&self) -> ErrorJson {
        ErrorJson {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}

/// The machine-readable form printed with `--json-errors`.
#[derive(Debug, Serialize)]
pub struct ErrorJson {
    pub error: &'static str,
    pub message: String,
    pub exit_code: i32,
}
