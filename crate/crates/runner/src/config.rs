//! JSON experiment descriptions.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use nsbandit::scenarios::{abrupt_three_arms, periodic_two_arms};
use nsbandit::{EnvironmentSpec, PolicySpec};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Result, RunnerError};

fn default_cycles() -> f64 {
    1.0
}

fn default_frequency_arm() -> usize {
    1
}

/// Environment of an experiment: a built-in scenario or an inline schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioSpec {
    /// Three arms, arm 3 best on `[3000, 5000)`.
    AbruptThreeArms,
    /// Two arms, arm 1 oscillating around arm 2.
    PeriodicTwoArms {
        #[serde(default = "default_cycles")]
        cycles: f64,
    },
    Inline {
        environment: EnvironmentSpec,
    },
}

impl ScenarioSpec {
    pub fn build(&self, horizon: u64) -> Result<EnvironmentSpec> {
        let env = match self {
            Self::AbruptThreeArms => abrupt_three_arms(horizon),
            Self::PeriodicTwoArms { cycles } => {
                nsbandit::PeriodicBernoulli::new(horizon, *cycles)?;
                periodic_two_arms(horizon, *cycles)
            }
            Self::Inline { environment } => {
                environment.validate()?;
                if environment.horizon() < horizon {
                    return Err(RunnerError::Config(format!(
                        "inline environment covers {} rounds, experiment needs {horizon}",
                        environment.horizon()
                    )));
                }
                environment.clone()
            }
        };
        Ok(env)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub policies: Vec<PolicySpec>,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Arm whose cumulative play frequency is reported (1-based).
    #[serde(default = "default_frequency_arm")]
    pub frequency_arm: usize,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let config: Self = serde_json::from_str(&text).map_err(|source| RunnerError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(RunnerError::Config(
                "at least one policy is required".into(),
            ));
        }
        if self.replications == 0 {
            return Err(RunnerError::Config("replications must be positive".into()));
        }
        let env = self.scenario.build(self.horizon)?;
        let arms = env.arms();
        if self.horizon < arms as u64 {
            return Err(RunnerError::Config(format!(
                "horizon {} shorter than K = {arms}",
                self.horizon
            )));
        }
        if self.frequency_arm == 0 || self.frequency_arm > arms {
            return Err(RunnerError::Config(format!(
                "frequency arm {} outside 1..={arms}",
                self.frequency_arm
            )));
        }
        let mut labels = HashSet::new();
        for p in &self.policies {
            if !labels.insert(p.label()) {
                return Err(RunnerError::Config(format!(
                    "duplicate policy label {}",
                    p.label()
                )));
            }
        }
        Ok(())
    }
}
