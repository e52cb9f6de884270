//! Configuration, seeded campaigns, reports and the command-line front end
//! of the `qei-core` laboratory.
//!
//! A run reads a JSON [`config::RunConfig`], executes one command (see
//! [`run::Command`]) and writes a JSON report, CSV tables and a metadata file
//! with wall-clock data. Exit codes: 0 when every check passes, 1 when a
//! check fails, 2 for configuration or IO errors, 3 for numerical
//! certification failures.

pub mod campaigns;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod tables;

pub use config::{Campaign, RunConfig};
pub use error::CliError;
pub use run::{execute, run, Command, OutputPaths};
