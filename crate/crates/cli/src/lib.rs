//! Batch experiment runner behind the `wavelab` binary.

pub mod config;
pub mod experiments;
pub mod runner;

pub use config::{Config, ConfigError};
pub use runner::{run_experiment, RunError, RunOptions, RunSummary};
