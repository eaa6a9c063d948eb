use super::{
    check_arm, check_reward, clamped_ln, select_arm, Policy, PolicyKind, DISCOUNT_UNDERFLOW,
};
use crate::error::{config_err, Result};
use crate::rng::RngStream;
use crate::types::ArmId;

/// Discounted UCB.
///
/// Keeps `N_t(gamma, i) = sum_s gamma^(t-s) 1{I_s = i}` and the matching
/// discounted reward sums with the recurrence "scale everything by gamma,
/// then credit the played arm". The index is the discounted mean plus
/// `2B * sqrt(xi * ln n_t(gamma) / N_t(gamma, i))` where `n_t(gamma)` is the
/// discounted total.
#[derive(Debug, Clone)]
pub struct Ducb {
    xi: f64,
    gamma: f64,
    reward_bound: f64,
    counts: Vec<f64>,
    sums: Vec<f64>,
    total: f64,
    t: u64,
}

impl Ducb {
    pub fn new(arms: usize, xi: f64, gamma: f64, reward_bound: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(config_err(format!("D-UCB needs xi > 0, got {xi}")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(config_err(format!(
                "D-UCB needs gamma in (0, 1], got {gamma}"
            )));
        }
        if !(reward_bound > 0.0) {
            return Err(config_err("reward bound must be positive"));
        }
        Ok(Self {
            xi,
            gamma,
            reward_bound,
            counts: vec![0.0; arms],
            sums: vec![0.0; arms],
            total: 0.0,
            t: 0,
        })
    }

    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn discounted_count(&self, arm: ArmId) -> f64 {
        self.counts[arm.zero_based()]
    }

    pub fn discounted_sum(&self, arm: ArmId) -> f64 {
        self.sums[arm.zero_based()]
    }

    /// `n_t(gamma)`, the discounted number of rounds.
    pub fn discounted_total(&self) -> f64 {
        self.total
    }

    pub fn index(&self, arm: ArmId) -> f64 {
        let i = arm.zero_based();
        let n = self.counts[i];
        if n < DISCOUNT_UNDERFLOW {
            return f64::INFINITY;
        }
        let mean = self.sums[i] / n;
        mean + 2.0 * self.reward_bound * (self.xi * clamped_ln(self.total) / n).sqrt()
    }

    pub fn indices(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| self.index(ArmId::from_zero_based(i)))
            .collect()
    }

    pub fn update(&mut self, arm: ArmId, reward: f64) -> Result<()> {
        let played = check_arm(arm, self.counts.len())?;
        check_reward(reward, self.reward_bound)?;
        for (count, sum) in self.counts.iter_mut().zip(self.sums.iter_mut()) {
            *count *= self.gamma;
            *sum *= self.gamma;
        }
        self.counts[played] += 1.0;
        self.sums[played] += reward;
        self.total = self.gamma * self.total + 1.0;
        self.t += 1;
        Ok(())
    }
}

impl Policy for Ducb {
    fn name(&self) -> &str {
        "D-UCB"
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
