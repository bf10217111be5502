//! Library side of the `qcnn` binary: experiment config, validation and the
//! five subcommands.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{ExperimentConfig, FieldError, GradcheckOptions, Overrides};
pub use error::CliError;
