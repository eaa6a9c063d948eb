//! Arm-selection policies.
//!
//! UCB-family policies (UCB-1, D-UCB, SW-UCB) play every arm once in rounds
//! `1..=K` and then maximize an upper-confidence index. EXP3.S and the
//! oracle select from round 1.

mod ducb;
mod exp3s;
mod oracle;
mod swucb;
mod ucb1;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use ducb::Ducb;
pub use exp3s::Exp3s;
pub use oracle::Oracle;
pub use swucb::SwUcb;
pub use ucb1::Ucb1;

use crate::env::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::ArmId;

/// Discounted counts below this are treated as zero.
pub(crate) const DISCOUNT_UNDERFLOW: f64 = 1e-300;

/// Information class of a policy, used when reporting lower-bound runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Selection is a deterministic function of past rewards.
    Deterministic,
    /// Selection also uses internal randomness.
    Randomized,
    /// Selection reads the environment's means directly.
    Clairvoyant,
}

pub trait Policy: Send {
    fn name(&self) -> &str;

    fn kind(&self) -> PolicyKind;

    fn arms(&self) -> usize;

    /// Whether rounds `1..=K` play arms `1..=K` in order before `select`
    /// is consulted.
    fn round_robin_start(&self) -> bool {
        true
    }

    fn select(&mut self, t: u64, rng: &mut RngStream) -> Result<ArmId>;

    fn observe(&mut self, arm: ArmId, reward: f64) -> Result<()>;
}

/// Argmax with ties broken towards the lowest arm; `+inf` beats every
/// finite value.
pub fn select_arm(indices: &[f64]) -> Result<ArmId> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, &value) in indices.iter().enumerate() {
        if value.is_nan() {
            return Err(Error::Internal(format!("NaN index for arm {}", pos + 1)));
        }
        match best {
            Some((_, b)) if value <= b => {}
            _ => best = Some((pos, value)),
        }
    }
    best.map(|(pos, _)| ArmId::from_zero_based(pos))
        .ok_or_else(|| Error::Internal("no arms to select from".into()))
}

pub(crate) fn check_reward(reward: f64, bound: f64) -> Result<()> {
    if !(0.0..=bound).contains(&reward) {
        return Err(Error::Internal(format!(
            "reward {reward} outside [0, {bound}]"
        )));
    }
    Ok(())
}

pub(crate) fn check_arm(arm: ArmId, arms: usize) -> Result<usize> {
    if arm.index() > arms {
        return Err(Error::ArmOutOfRange {
            arm: arm.index(),
            arms,
        });
    }
    Ok(arm.zero_based())
}

/// `ln(x)` clamped at zero for arguments below 1.
pub(crate) fn clamped_ln(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

fn default_xi() -> f64 {
    0.5
}

/// Serializable policy description, as found in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Ucb1 {
        #[serde(default = "default_xi")]
        xi: f64,
        #[serde(default)]
        label: Option<String>,
    },
    Ducb {
        #[serde(default = "default_xi")]
        xi: f64,
        gamma: f64,
        #[serde(default)]
        label: Option<String>,
    },
    Swucb {
        #[serde(default = "default_xi")]
        xi: f64,
        tau: u64,
        #[serde(default)]
        label: Option<String>,
    },
    Exp3s {
        gamma: f64,
        alpha: f64,
        #[serde(default)]
        label: Option<String>,
    },
    Oracle {
        #[serde(default)]
        label: Option<String>,
    },
}

impl PolicySpec {
    pub fn build(&self, env: &Arc<EnvironmentSpec>, reward_bound: f64) -> Result<Box<dyn Policy>> {
        let arms = env.arms();
        Ok(match self {
            Self::Ucb1 { xi, .. } => Box::new(Ucb1::new(arms, *xi, reward_bound)?),
            Self::Ducb { xi, gamma, .. } => Box::new(Ducb::new(arms, *xi, *gamma, reward_bound)?),
            Self::Swucb { xi, tau, .. } => Box::new(SwUcb::new(arms, *xi, *tau, reward_bound)?),
            Self::Exp3s { gamma, alpha, .. } => {
                Box::new(Exp3s::new(arms, *gamma, *alpha, reward_bound)?)
            }
            Self::Oracle { .. } => Box::new(Oracle::new(Arc::clone(env))),
        })
    }

    /// Name used in traces and CSV output.
    pub fn label(&self) -> String {
        let (label, default) = match self {
            Self::Ucb1 { label, .. } => (label, "UCB-1"),
            Self::Ducb { label, .. } => (label, "D-UCB"),
            Self::Swucb { label, .. } => (label, "SW-UCB"),
            Self::Exp3s { label, .. } => (label, "EXP3.S"),
            Self::Oracle { label } => (label, "Oracle"),
        };
        label.clone().unwrap_or_else(|| default.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arm(i: usize) -> ArmId {
        ArmId::from_zero_based(i - 1)
    }

    #[test]
    fn argmax_rules() {
        assert_eq!(select_arm(&[0.3, 0.9, 0.5]).unwrap(), arm(2));
        assert_eq!(select_arm(&[0.7, 0.7, 0.1]).unwrap(), arm(1));
        assert_eq!(
            select_arm(&[0.2, f64::INFINITY, f64::INFINITY]).unwrap(),
            arm(2)
        );
        assert_eq!(select_arm(&[f64::NEG_INFINITY, -1.0]).unwrap(), arm(2));
    }

    #[test]
    fn argmax_rejects_nan() {
        assert!(matches!(
            select_arm(&[0.1, f64::NAN]),
            Err(Error::Internal(_))
        ));
        assert!(select_arm(&[]).is_err());
    }

    #[test]
    fn log_clamp() {
        assert_eq!(clamped_ln(0.5), 0.0);
        assert_eq!(clamped_ln(1.0), 0.0);
        assert!((clamped_ln(std::f64::consts::E) - 1.0).abs() < 1e-15);
    }
}
