use super::{check_arm, check_reward, clamped_ln, select_arm, Policy, PolicyKind};
use crate::error::{config_err, Result};
use crate::rng::RngStream;
use crate::types::ArmId;

/// UCB-1 with padding `B * sqrt(xi * ln t / N_t(i))`.
#[derive(Debug, Clone)]
pub struct Ucb1 {
    xi: f64,
    reward_bound: f64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    t: u64,
}

impl Ucb1 {
    pub fn new(arms: usize, xi: f64, reward_bound: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(config_err(format!("UCB-1 needs xi > 0, got {xi}")));
        }
        if !(reward_bound > 0.0) {
            return Err(config_err("reward bound must be positive"));
        }
        Ok(Self {
            xi,
            reward_bound,
            counts: vec![0; arms],
            sums: vec![0.0; arms],
            t: 0,
        })
    }

    /// Rounds observed so far.
    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn count(&self, arm: ArmId) -> u64 {
        self.counts[arm.zero_based()]
    }

    pub fn reward_sum(&self, arm: ArmId) -> f64 {
        self.sums[arm.zero_based()]
    }

    /// Empirical mean plus padding; `+inf` for an unplayed arm.
    pub fn index(&self, arm: ArmId) -> f64 {
        let i = arm.zero_based();
        let n = self.counts[i];
        if n == 0 {
            return f64::INFINITY;
        }
        let n = n as f64;
        let mean = self.sums[i] / n;
        mean + self.reward_bound * (self.xi * clamped_ln(self.t as f64) / n).sqrt()
    }

    pub fn indices(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| self.index(ArmId::from_zero_based(i)))
            .collect()
    }

    pub fn update(&mut self, arm: ArmId, reward: f64) -> Result<()> {
        let i = check_arm(arm, self.counts.len())?;
        check_reward(reward, self.reward_bound)?;
        self.counts[i] += 1;
        self.sums[i] += reward;
        self.t += 1;
        Ok(())
    }
}

impl Policy for Ucb1 {
    fn name(&self) -> &str {
        "UCB-1"
    }

    fn kind(&self) -> PolicyKind {
        PolicyKind::Deterministic
    }

    fn arms(&self) -> usize {
        self.counts.len()
    }

    fn select(&mut self, _t: u64, _rng: &mut RngStream) -> Result<ArmId> {
        select_arm(&self.indices())
    }

    fn observe(&mut self, arm: ArmId, reward: f64) -> Result<()> {
        self.update(arm, reward)
    }
}
