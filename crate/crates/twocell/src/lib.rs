//! File formats and the command-line driver for `twocell-core`.
//!
//! * [`config`] reads the flat `key = value` scenario files.
//! * [`csv`] writes and reads sweep results.
//! * [`cli`] implements the `sweep` and `feasibility` subcommands.

pub mod cli;
pub mod config;
pub mod csv;

pub use config::{load_config, parse_config, ConfigError, ConfigFile};
pub use csv::{emit_csv, emit_feasibility_csv, format_sig, parse_csv, CsvRow};
