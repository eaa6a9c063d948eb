//! Experiment orchestration on top of `nsbandit`: JSON configs, tuning
//! rules, reference presets and CSV output.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod tuning;

pub use config::{ExperimentConfig, ScenarioSpec};
pub use error::{Result, RunnerError};
pub use run::{run_experiment, write_outputs, ExperimentResult};
