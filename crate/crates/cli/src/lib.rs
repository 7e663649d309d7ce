//! Command-line front end for the meanlab mean-equality toolkit.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Command, ConfigError, Format, JobConfig};
pub use run::{run, CliError};
