//! Command-line front-end over the `treslev` analytics.
//!
//! Each command returns a [`commands::Report`] (tables plus a JSON value)
//! that is rendered in the requested [`cli::Format`]. Exit codes:
//! 0 success, 2 configuration or usage error, 3 non-viable combination,
//! 4 singular reference volume, 5 infeasible scenario or fit, 6 I/O failure.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use cli::{Cli, Format};
pub use commands::{run, Outcome, Report};
pub use config::{Project, Projects};
pub use error::CliError;
