//! Library side of the `nonrecip` command-line tool: configuration parsing,
//! output formatting and the subcommands themselves.

pub mod commands;
pub mod config;
pub mod format;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
