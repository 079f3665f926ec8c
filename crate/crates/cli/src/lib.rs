//! Command-line harness for `ergoclust`: sample files, dataset manifests,
//! the subcommands and the recovery-rate experiment runner.

pub mod commands;
pub mod config;
mod error;
pub mod experiment;
pub mod manifest;
pub mod sample_io;

pub use error::{CliError, Result, EXIT_COMPUTE, EXIT_INPUT, EXIT_IO};
