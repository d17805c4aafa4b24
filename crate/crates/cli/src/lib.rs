//! Config-driven experiment runner for the shiftlab checkers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use runner::{run, RunReport};
