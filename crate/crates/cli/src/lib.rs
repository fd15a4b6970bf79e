//! Commands behind the `nql` binary: fit a model from a config file, then
//! rank, report on, or plot any dataset with the same column schema.

pub mod commands;
pub mod error;
pub mod run_config;
pub mod svg;

pub use commands::{cmd_fit, cmd_plot, cmd_rank, cmd_report, fit_model, rank_table, FitOutcome, Report};
pub use error::CliError;
pub use run_config::{Axes, RunConfig};
