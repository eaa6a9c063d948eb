//! The round loop shared by every experiment.

use std::sync::Arc;

use rayon::prelude::*;

use crate::env::EnvironmentSpec;
use crate::error::{config_err, Result};
use crate::policy::{Policy, PolicySpec};
use crate::rng::{derive_stream, RngStream};
use crate::types::{ArmId, EpisodeConfig, EpisodeTrace, RoundRecord};

/// The two independent streams one replication consumes.
#[derive(Debug, Clone)]
pub struct EpisodeStreams {
    pub rewards: RngStream,
    pub policy: RngStream,
}

impl EpisodeStreams {
    /// Streams for `replication`, tagged `"rewards"` and `"policy"`.
    pub fn derive(seed: u64, replication: u64) -> Self {
        Self::derive_tagged(seed, replication, "")
    }

    /// Like [`EpisodeStreams::derive`] with an extra tag suffix, so that
    /// several environments under one seed draw independent rewards.
    pub fn derive_tagged(seed: u64, replication: u64, suffix: &str) -> Self {
        Self {
            rewards: derive_stream(seed, replication, &format!("rewards{suffix}")),
            policy: derive_stream(seed, replication, &format!("policy{suffix}")),
        }
    }
}

/// Play `policy` against `env` for `config.horizon` rounds.
///
/// Rounds `1..=K` play arms `1..=K` when the policy asks for a round-robin
/// start; every other round is the policy's choice. Each round consumes
/// exactly one reward draw.
pub fn run_episode(
    config: &EpisodeConfig,
    env: &EnvironmentSpec,
    policy: &mut dyn Policy,
    replication: u64,
    mut streams: EpisodeStreams,
) -> Result<EpisodeTrace> {
    config.validate()?;
    if env.horizon() < config.horizon {
        return Err(config_err(format!(
            "environment horizon {} shorter than episode horizon {}",
            env.horizon(),
            config.horizon
        )));
    }
    if env.arms() != config.arms || policy.arms() != config.arms {
        return Err(config_err(format!(
            "arm count mismatch: config {}, environment {}, policy {}",
            config.arms,
            env.arms(),
            policy.arms()
        )));
    }
    if env.reward_bound() > config.reward_bound {
        return Err(config_err(
            "environment rewards exceed the configured bound",
        ));
    }

    let arms = config.arms as u64;
    let round_robin = policy.round_robin_start();
    let mut records = Vec::with_capacity(config.horizon as usize);
    for t in 1..=config.horizon {
        let arm = if round_robin && t <= arms {
            ArmId::from_zero_based((t - 1) as usize)
        } else {
            policy.select(t, &mut streams.policy)?
        };
        let reward = env.sample_reward(t, arm, &mut streams.rewards)?;
        let (oracle_arm, oracle_mean) = env.best_arm(t)?;
        let arm_mean = env.mean_at(t, arm)?;
        policy.observe(arm, reward)?;
        records.push(RoundRecord {
            t,
            arm,
            reward,
            oracle_arm,
            oracle_mean,
            arm_mean,
        });
    }
    Ok(EpisodeTrace {
        policy_name: policy.name().to_string(),
        replication,
        records,
    })
}

/// Run `config.replications` independent episodes of `spec` in parallel and
/// reduce each trace with `reduce`. Results come back in replication order.
pub fn run_replications<R, F>(
    config: &EpisodeConfig,
    env: &Arc<EnvironmentSpec>,
    spec: &PolicySpec,
    stream_suffix: &str,
    reduce: F,
) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(EpisodeTrace) -> Result<R> + Sync,
{
    let label = spec.label();
    (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut policy = spec.build(env, config.reward_bound)?;
            let streams = EpisodeStreams::derive_tagged(config.seed, rep, stream_suffix);
            let mut trace = run_episode(config, env, policy.as_mut(), rep, streams)?;
            trace.policy_name.clone_from(&label);
            reduce(trace)
        })
        .collect()
}
