//! Experiment driver for `invlab-core`: configuration files, output
//! writers, the command implementations behind the `invlab` binary and the
//! acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod maps;
pub mod output;

pub use error::{CliError, Result};
