//! Command-line front end for the `gkm` library: configuration files, commands and reports.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, Command};
pub use config::{parse_config, ConfigError, SessionConfig};
pub use report::Report;
