use std::sync::Arc;

use super::{Policy, PolicyKind};
use crate::env::EnvironmentSpec;
use crate::error::Result;
use crate::rng::RngStream;
use crate::types::ArmId;

/// Clairvoyant benchmark: plays the best arm of every round.
#[derive(Debug, Clone)]
pub struct Oracle {
    env: Arc<EnvironmentSpec>,
}

impl Oracle {
    pub fn new(env: Arc<EnvironmentSpec>) -> Self {
        Self { env }
    }
}

impl Policy for Oracle {
    fn name(&self) -> &str {
        "Oracle"
    }

    fn kind(&self) -> PolicyKind {
        PolicyKind::Clairvoyant
    }

    fn arms(&self) -> usize {
        self.env.arms()
    }

    fn round_robin_start(&self) -> bool {
        false
    }

    fn select(&mut self, t: u64, _rng: &mut RngStream) -> Result<ArmId> {
        Ok(self.env.best_arm(t)?.0)
    }

    fn observe(&mut self, _arm: ArmId, _reward: f64) -> Result<()> {
        Ok(())
    }
}
