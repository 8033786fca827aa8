//! Experiment runner for temporal quantum correlation hierarchies: reads a
//! TOML experiment file, runs the sweep and emits CSV.

pub mod app;
pub mod config;
pub mod experiments;

pub use app::{run_cli, Args, CliError};
pub use config::{Experiment, ExperimentConfig, Overrides, Plan};
pub use experiments::{Report, RunError, Table};
