use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};

/// A 1-based arm index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArmId(usize);

impl ArmId {
    /// Build an arm id, checking `1 <= index <= arms`.
    pub fn new(index: usize, arms: usize) -> Result<Self> {
        if index == 0 || index > arms {
            return Err(Error::ArmOutOfRange { arm: index, arms });
        }
        Ok(Self(index))
    }

    /// Arm id from a 0-based position. Callers guarantee the bound.
    pub(crate) fn from_zero_based(pos: usize) -> Self {
        Self(pos + 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shape of one episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub arms: usize,
    pub horizon: u64,
    pub reward_bound: f64,
    pub seed: u64,
    pub replications: u64,
}

impl EpisodeConfig {
    pub fn new(
        arms: usize,
        horizon: u64,
        reward_bound: f64,
        seed: u64,
        replications: u64,
    ) -> Result<Self> {
        let cfg = Self {
            arms,
            horizon,
            reward_bound,
            seed,
            replications,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms < 2 {
            return Err(config_err(format!(
                "need at least 2 arms, got {}",
                self.arms
            )));
        }
        if self.horizon < self.arms as u64 {
            return Err(config_err(format!(
                "horizon {} shorter than the {} initialization rounds",
                self.horizon, self.arms
            )));
        }
        if !(self.reward_bound > 0.0 && self.reward_bound.is_finite()) {
            return Err(config_err(format!(
                "reward bound must be positive, got {}",
                self.reward_bound
            )));
        }
        if self.replications == 0 {
            return Err(config_err("replication count must be at least 1"));
        }
        Ok(())
    }
}

/// What happened in one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u64,
    pub arm: ArmId,
    pub reward: f64,
    pub oracle_arm: ArmId,
    pub oracle_mean: f64,
    pub arm_mean: f64,
}

/// The full history of one policy on one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub policy_name: String,
    pub replication: u64,
    pub records: Vec<RoundRecord>,
}

impl EpisodeTrace {
    pub fn horizon(&self) -> u64 {
        self.records.len() as u64
    }

    /// Arms played, in round order.
    pub fn plays(&self) -> impl Iterator<Item = ArmId> + '_ {
        self.records.iter().map(|r| r.arm)
    }
}
