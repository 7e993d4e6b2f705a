//! Command-line front end for censored MDPD tail-index estimation.

pub mod app;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod svg;

pub use app::{run, Cli};
pub use error::{CliError, CliResult};
