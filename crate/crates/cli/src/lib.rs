//! Scenario-file driver for the `shvel` command-line tool.
//!
//! A scenario is a TOML file describing the medium, the desired source(s), an
//! optional loudspeaker array, the listening region, truncation degree,
//! frequencies and evaluation grid. Each subcommand writes CSV files (first
//! line `# shvel <version> command=<cmd> scenario_sha256=<hex>`) and a
//! `run.json` with the degrees, grid spacing and point counts used.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

pub use commands::{run, Command};
pub use error::CliError;
pub use scenario::Scenario;
