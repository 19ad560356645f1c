//! Experiment driver for the `fekete` command-line tool: JSON configs in,
//! JSON reports and CSV tables out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
