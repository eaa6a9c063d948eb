use std::f64::consts::E;

use super::{check_arm, check_reward, Policy, PolicyKind};
use crate::error::{config_err, Error, Result};
use crate::rng::RngStream;
use crate::types::ArmId;

/// Weights are rescaled once the largest exceeds this.
const RESCALE_ABOVE: f64 = 1e200;

/// EXP3.S: exponential weights with a fixed-share term.
///
/// `p(i) = (1 - gamma) w(i) / W + gamma / K`; after playing arm `j` with
/// probability `p(j)` the estimate `x = (r / B) / p(j)` feeds
/// `w(i) <- w(i) exp(gamma x(i) / K) + (e alpha / K) W`.
#[derive(Debug, Clone)]
pub struct Exp3s {
    gamma: f64,
    alpha: f64,
    reward_bound: f64,
    weights: Vec<f64>,
    last_probability: Option<(usize, f64)>,
    t: u64,
}

impl Exp3s {
    pub fn new(arms: usize, gamma: f64, alpha: f64, reward_bound: f64) -> Result<Self> {
        if arms == 0 {
            return Err(config_err("EXP3.S needs at least one arm"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(config_err(format!(
                "EXP3.S needs gamma in (0, 1], got {gamma}"
            )));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(config_err(format!("EXP3.S needs alpha >= 0, got {alpha}")));
        }
        if !(reward_bound > 0.0) {
            return Err(config_err("reward bound must be positive"));
        }
        Ok(Self {
            gamma,
            alpha,
            reward_bound,
            weights: vec![1.0; arms],
            last_probability: None,
            t: 0,
        })
    }

    /// Start from explicit weights instead of all ones.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.weights.len()
            || weights.iter().any(|w| !(*w > 0.0 && w.is_finite()))
        {
            return Err(config_err(
                "EXP3.S weights must be positive, finite, one per arm",
            ));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / k)
            .collect()
    }

    /// Apply one observation of `arm`, which was drawn with probability
    /// `p_played`.
    pub fn update(&mut self, arm: ArmId, reward: f64, p_played: f64) -> Result<()> {
        let played = check_arm(arm, self.weights.len())?;
        check_reward(reward, self.reward_bound)?;
        if !(p_played > 0.0) {
            return Err(Error::Internal(format!(
                "EXP3.S update with probability {p_played}"
            )));
        }
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        let share = E * self.alpha / k * total;
        let estimate = reward / self.reward_bound / p_played;
        for (i, w) in self.weights.iter_mut().enumerate() {
            let boost = if i == played {
                (self.gamma * estimate / k).exp()
            } else {
                1.0
            };
            *w = *w * boost + share;
        }
        // with p from probabilities() one update multiplies a weight by at
        // most e (plus the share term), so a per-round check keeps weights finite
        let max = self.weights.iter().cloned().fold(0.0, f64::max);
        if max > RESCALE_ABOVE {
            for w in &mut self.weights {
                *w = (*w / max).max(f64::MIN_POSITIVE);
            }
        }
        self.t += 1;
        Ok(())
    }
}

impl Policy for Exp3s {
    fn name(&self) -> &str {
        "EXP3.S"
    }

    fn kind(&self) -> PolicyKind {
        PolicyKind::Randomized
    }

    fn arms(&self) -> usize {
        self.weights.len()
    }

    fn round_robin_start(&self) -> bool {
        false
    }

    fn select(&mut self, _t: u64, rng: &mut RngStream) -> Result<ArmId> {
        let probs = self.probabilities();
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut chosen = probs.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        self.last_probability = Some((chosen, probs[chosen]));
        Ok(ArmId::from_zero_based(chosen))
    }

    fn observe(&mut self, arm: ArmId, reward: f64) -> Result<()> {
        let p = match self.last_probability.take() {
            Some((i, p)) if i == arm.zero_based() => p,
            _ => self.probabilities()[check_arm(arm, self.weights.len())?],
        };
        self.update(arm, reward, p)
    }
}
