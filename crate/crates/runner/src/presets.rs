//! The two reference experiments.

use nsbandit::PolicySpec;

use crate::config::{ExperimentConfig, ScenarioSpec};
use crate::error::{Result, RunnerError};
use crate::tuning::{exp3s_params, reference_gamma, reference_tau};

pub const PRESETS: [&str; 2] = ["abrupt", "periodic"];

/// Default horizon of both presets.
pub const PRESET_HORIZON: u64 = 10_000;

/// UCB-1, EXP3.S, D-UCB and SW-UCB with the reference parameters for `K`
/// arms and horizon `T` (EXP3.S tuned for two breakpoints).
pub fn reference_policies(arms: usize, horizon: u64) -> Result<Vec<PolicySpec>> {
    let (gamma, alpha) = exp3s_params(arms, horizon, 2.0)?;
    Ok(vec![
        PolicySpec::Ucb1 {
            xi: 0.5,
            label: None,
        },
        PolicySpec::Exp3s {
            gamma,
            alpha,
            label: None,
        },
        PolicySpec::Ducb {
            xi: 0.5,
            gamma: reference_gamma(horizon)?,
            label: None,
        },
        PolicySpec::Swucb {
            xi: 0.5,
            tau: reference_tau(horizon),
            label: None,
        },
    ])
}

pub fn preset(name: &str, horizon: u64, replications: u64, seed: u64) -> Result<ExperimentConfig> {
    let (scenario, arms) = match name {
        "abrupt" => (ScenarioSpec::AbruptThreeArms, 3),
        "periodic" => (ScenarioSpec::PeriodicTwoArms { cycles: 1.0 }, 2),
        other => {
            return Err(RunnerError::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    let config = ExperimentConfig {
        scenario,
        policies: reference_policies(arms, horizon)?,
        horizon,
        replications,
        seed,
        output_dir: None,
        frequency_arm: 1,
    };
    config.validate()?;
    Ok(config)
}
