use std::collections::VecDeque;

use super::{check_arm, check_reward, clamped_ln, select_arm, Policy, PolicyKind};
use crate::error::{config_err, Result};
use crate::rng::RngStream;
use crate::types::ArmId;

/// Sliding-window UCB: statistics over the last `tau` plays only, padding
/// `B * sqrt(xi * ln(min(t, tau)) / N_t(tau, i))`.
#[derive(Debug, Clone)]
pub struct SwUcb {
    xi: f64,
    window: u64,
    reward_bound: f64,
    buffer: VecDeque<(usize, f64)>,
    counts: Vec<u64>,
    sums: Vec<f64>,
    t: u64,
}

impl SwUcb {
    pub fn new(arms: usize, xi: f64, window: u64, reward_bound: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(config_err(format!("SW-UCB needs xi > 0, got {xi}")));
        }
        if window == 0 {
            return Err(config_err("SW-UCB window must be at least 1"));
        }
        if !(reward_bound > 0.0) {
            return Err(config_err("reward bound must be positive"));
        }
        Ok(Self {
            xi,
            window,
            reward_bound,
            buffer: VecDeque::with_capacity(window.min(1 << 20) as usize),
            counts: vec![0; arms],
            sums: vec![0.0; arms],
            t: 0,
        })
    }

    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    /// Plays currently held, oldest first.
    pub fn buffer(&self) -> impl Iterator<Item = (ArmId, f64)> + '_ {
        self.buffer
            .iter()
            .map(|&(a, r)| (ArmId::from_zero_based(a), r))
    }

    pub fn windowed_count(&self, arm: ArmId) -> u64 {
        self.counts[arm.zero_based()]
    }

    pub fn windowed_sum(&self, arm: ArmId) -> f64 {
        self.sums[arm.zero_based()]
    }

    /// `+inf` when the arm has dropped out of the window.
    pub fn index(&self, arm: ArmId) -> f64 {
        let i = arm.zero_based();
        let n = self.counts[i];
        if n == 0 {
            return f64::INFINITY;
        }
        let n = n as f64;
        let mean = self.sums[i] / n;
        let horizon = self.t.min(self.window) as f64;
        mean + self.reward_bound * (self.xi * clamped_ln(horizon) / n).sqrt()
    }

    pub fn indices(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| self.index(ArmId::from_zero_based(i)))
            .collect()
    }

    pub fn update(&mut self, arm: ArmId, reward: f64) -> Result<()> {
        let i = check_arm(arm, self.counts.len())?;
        check_reward(reward, self.reward_bound)?;
        self.buffer.push_back((i, reward));
        self.counts[i] += 1;
        self.sums[i] += reward;
        if self.buffer.len() as u64 > self.window {
            let (old, r) = self.buffer.pop_front().expect("buffer is non-empty");
            self.counts[old] -= 1;
            self.sums[old] = if self.counts[old] == 0 {
                0.0
            } else {
                self.sums[old] - r
            };
        }
        self.t += 1;
        Ok(())
    }
}

impl Policy for SwUcb {
    fn name(&self) -> &str {
        "SW-UCB"
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
