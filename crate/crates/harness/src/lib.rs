//! Experiment runner for the `rotor_gibbs` library: typed TOML configs,
//! deterministic seeding, CSV output with JSON manifests, and plot data.

pub mod config;
mod error;
pub mod experiments;
pub mod manifest;
pub mod plot;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::HarnessError;
pub use experiments::{compute, run_experiment, Outcome};
pub use manifest::{Check, RunRecord, RunStatus};
