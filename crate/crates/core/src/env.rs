//! Reward-generating processes.
//!
//! Both built-in environments emit Bernoulli rewards, so the reward bound is
//! always 1. Means are exposed analytically: regret is computed from them
//! and never from counterfactual draws.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::rng::RngStream;
use crate::types::ArmId;

/// One constant piece of an arm's schedule, active from `start` (1-based)
/// until the next segment begins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: u64,
    pub p: f64,
}

/// Per-arm piecewise-constant Bernoulli means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewiseConstantBernoulli {
    horizon: u64,
    arms: Vec<Vec<Segment>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawPiecewise {
    horizon: u64,
    arms: Vec<Vec<Segment>>,
}

impl TryFrom<RawPiecewise> for PiecewiseConstantBernoulli {
    type Error = Error;

    fn try_from(raw: RawPiecewise) -> Result<Self> {
        Self::new(raw.horizon, raw.arms)
    }
}

impl From<PiecewiseConstantBernoulli> for RawPiecewise {
    fn from(env: PiecewiseConstantBernoulli) -> Self {
        Self {
            horizon: env.horizon,
            arms: env.arms,
        }
    }
}

impl PiecewiseConstantBernoulli {
    /// Validate a schedule. Adjacent segments with equal means are merged so
    /// that every stored segment start is a genuine change.
    pub fn new(horizon: u64, arms: Vec<Vec<Segment>>) -> Result<Self> {
        if horizon == 0 {
            return Err(config_err("environment horizon must be positive"));
        }
        if arms.is_empty() {
            return Err(config_err("environment needs at least one arm"));
        }
        let mut merged = Vec::with_capacity(arms.len());
        for (pos, segments) in arms.into_iter().enumerate() {
            let arm = pos + 1;
            let first = segments
                .first()
                .ok_or_else(|| config_err(format!("arm {arm} has no segments")))?;
            if first.start != 1 {
                return Err(config_err(format!(
                    "arm {arm}: first segment must start at round 1"
                )));
            }
            let mut kept: Vec<Segment> = Vec::with_capacity(segments.len());
            for seg in segments {
                if !(0.0..=1.0).contains(&seg.p) {
                    return Err(config_err(format!(
                        "arm {arm}: probability {} outside [0,1]",
                        seg.p
                    )));
                }
                if let Some(last) = kept.last() {
                    if seg.start <= last.start {
                        return Err(config_err(format!(
                            "arm {arm}: segment starts must strictly increase"
                        )));
                    }
                    if seg.p == last.p {
                        continue;
                    }
                }
                kept.push(seg);
            }
            merged.push(kept);
        }
        Ok(Self {
            horizon,
            arms: merged,
        })
    }

    /// Every arm constant over the whole horizon.
    pub fn constant(horizon: u64, means: &[f64]) -> Result<Self> {
        Self::new(
            horizon,
            means
                .iter()
                .map(|&p| vec![Segment { start: 1, p }])
                .collect(),
        )
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn arms(&self) -> usize {
        self.arms.len()
    }

    pub fn segments(&self, arm: ArmId) -> &[Segment] {
        &self.arms[arm.zero_based()]
    }

    fn mean_unchecked(&self, t: u64, arm: usize) -> f64 {
        let segs = &self.arms[arm];
        let idx = segs.partition_point(|s| s.start <= t);
        segs[idx - 1].p
    }

    fn change_rounds(&self, horizon: u64) -> Vec<u64> {
        let mut rounds: Vec<u64> = self
            .arms
            .iter()
            .flat_map(|segs| segs.iter().skip(1).map(|s| s.start))
            .filter(|&s| s <= horizon)
            .collect();
        rounds.sort_unstable();
        rounds.dedup();
        rounds
    }
}

/// Two arms; arm 2 fixed at `baseline`, arm 1 oscillating
/// `baseline + amplitude * cos(6 pi cycles t / horizon)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicBernoulli {
    pub horizon: u64,
    #[serde(default = "PeriodicBernoulli::default_cycles")]
    pub cycles: f64,
    #[serde(default = "PeriodicBernoulli::default_baseline")]
    pub baseline: f64,
    #[serde(default = "PeriodicBernoulli::default_amplitude")]
    pub amplitude: f64,
}

impl PeriodicBernoulli {
    fn default_cycles() -> f64 {
        1.0
    }

    fn default_baseline() -> f64 {
        0.5
    }

    fn default_amplitude() -> f64 {
        0.4
    }

    pub fn new(horizon: u64, cycles: f64) -> Result<Self> {
        let env = Self {
            horizon,
            cycles,
            baseline: Self::default_baseline(),
            amplitude: Self::default_amplitude(),
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(config_err("environment horizon must be positive"));
        }
        if !self.cycles.is_finite() {
            return Err(config_err("cycles must be finite"));
        }
        let lo = self.baseline - self.amplitude.abs();
        let hi = self.baseline + self.amplitude.abs();
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
            return Err(config_err("periodic means leave [0,1]"));
        }
        Ok(())
    }

    fn mean_unchecked(&self, t: u64, arm: usize) -> f64 {
        if arm == 0 {
            let phase = 6.0 * PI * self.cycles * t as f64 / self.horizon as f64;
            self.baseline + self.amplitude * phase.cos()
        } else {
            self.baseline
        }
    }
}

/// Ordered rounds at which some arm's mean changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakpointSchedule {
    pub rounds: Vec<u64>,
}

impl BreakpointSchedule {
    /// Number of breakpoints, the usual Upsilon_T.
    pub fn count(&self) -> usize {
        self.rounds.len()
    }
}

/// A reward environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentSpec {
    Piecewise(PiecewiseConstantBernoulli),
    Periodic(PeriodicBernoulli),
}

impl From<PiecewiseConstantBernoulli> for EnvironmentSpec {
    fn from(env: PiecewiseConstantBernoulli) -> Self {
        Self::Piecewise(env)
    }
}

impl From<PeriodicBernoulli> for EnvironmentSpec {
    fn from(env: PeriodicBernoulli) -> Self {
        Self::Periodic(env)
    }
}

impl EnvironmentSpec {
    pub fn horizon(&self) -> u64 {
        match self {
            Self::Piecewise(e) => e.horizon,
            Self::Periodic(e) => e.horizon,
        }
    }

    pub fn arms(&self) -> usize {
        match self {
            Self::Piecewise(e) => e.arms(),
            Self::Periodic(_) => 2,
        }
    }

    /// Upper bound on rewards.
    pub fn reward_bound(&self) -> f64 {
        1.0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Piecewise(_) => Ok(()),
            Self::Periodic(e) => e.validate(),
        }
    }

    fn check_round(&self, t: u64) -> Result<()> {
        let horizon = self.horizon();
        if t == 0 || t > horizon {
            return Err(Error::RoundOutOfRange { round: t, horizon });
        }
        Ok(())
    }

    fn check_arm(&self, arm: ArmId) -> Result<()> {
        if arm.index() > self.arms() {
            return Err(Error::ArmOutOfRange {
                arm: arm.index(),
                arms: self.arms(),
            });
        }
        Ok(())
    }

    fn mean_unchecked(&self, t: u64, arm: usize) -> f64 {
        match self {
            Self::Piecewise(e) => e.mean_unchecked(t, arm),
            Self::Periodic(e) => e.mean_unchecked(t, arm),
        }
    }

    /// Expected reward of `arm` at round `t`.
    pub fn mean_at(&self, t: u64, arm: ArmId) -> Result<f64> {
        self.check_round(t)?;
        self.check_arm(arm)?;
        Ok(self.mean_unchecked(t, arm.zero_based()))
    }

    /// Best arm at round `t` and its mean; ties go to the lowest index.
    pub fn best_arm(&self, t: u64) -> Result<(ArmId, f64)> {
        self.check_round(t)?;
        let mut best = 0;
        let mut best_mean = self.mean_unchecked(t, 0);
        for arm in 1..self.arms() {
            let m = self.mean_unchecked(t, arm);
            if m > best_mean {
                best = arm;
                best_mean = m;
            }
        }
        Ok((ArmId::from_zero_based(best), best_mean))
    }

    /// One Bernoulli reward for `arm` at round `t`. Always consumes exactly
    /// one uniform draw.
    pub fn sample_reward(&self, t: u64, arm: ArmId, rng: &mut RngStream) -> Result<f64> {
        let p = self.mean_at(t, arm)?;
        Ok(if rng.bernoulli(p) { 1.0 } else { 0.0 })
    }

    /// Rounds `2..=min(horizon, env horizon)` where some arm's mean differs
    /// from the previous round. Simultaneous changes count once.
    pub fn breakpoints(&self, horizon: u64) -> BreakpointSchedule {
        let last = horizon.min(self.horizon());
        let rounds = match self {
            Self::Piecewise(e) => e.change_rounds(last),
            Self::Periodic(_) => (2..=last)
                .filter(|&t| {
                    (0..self.arms())
                        .any(|a| self.mean_unchecked(t, a) != self.mean_unchecked(t - 1, a))
                })
                .collect(),
        };
        BreakpointSchedule { rounds }
    }

    pub fn breakpoint_count(&self, horizon: u64) -> usize {
        self.breakpoints(horizon).count()
    }

    /// Smallest strictly positive gap `mu_t(*) - mu_t(arm)` over rounds
    /// `t <= horizon`.
    pub fn delta_mu(&self, horizon: u64, arm: ArmId) -> Result<f64> {
        self.check_arm(arm)?;
        let last = horizon.min(self.horizon());
        let mut min_gap = f64::INFINITY;
        for t in 1..=last {
            let (_, best) = self.best_arm(t)?;
            let gap = best - self.mean_unchecked(t, arm.zero_based());
            if gap > 0.0 && gap < min_gap {
                min_gap = gap;
            }
        }
        if min_gap.is_finite() {
            Ok(min_gap)
        } else {
            Err(Error::UndefinedGap(arm.index()))
        }
    }
}
