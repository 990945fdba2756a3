//! Command-line front end, file formats and verification suites for
//! [`greedy_widths_core`].
//!
//! The `greedy-widths` binary is a thin wrapper around [`cli::run`]. Every
//! output file carries the schema version and the build identifier, and a
//! run is a pure function of its configuration and seed.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod instances;
pub mod plots;
pub mod suites;

pub use config::{Format, RunConfig, SCHEMA_VERSION};
pub use error::{CliError, Result};
pub use formats::BUILD_ID;
