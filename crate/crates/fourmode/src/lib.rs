//! Configuration, dataset files, parallel runner and subcommands of the
//! `fourmode` command-line tool.

pub mod commands;
pub mod config;
pub mod dataset_io;
pub mod error;
pub mod output;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::CliError;

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "FOURMODE_OUT";
