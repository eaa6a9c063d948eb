//! Dynamic regret and bad-play bookkeeping.
//!
//! Regret is pseudo-regret: `r_t = sum_{s<=t} mu_s(*) - mu_s(I_s)` from the
//! environment's analytic means, never from realized rewards.

use crate::env::EnvironmentSpec;
use crate::error::{config_err, Result};
use crate::types::{ArmId, EpisodeTrace};

/// Cumulative expected regret after each round, `r_1 ..= r_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretSeries(pub Vec<f64>);

impl RegretSeries {
    pub fn final_value(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }
}

/// Per-arm count of rounds where the arm was played while not the best.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadPlayCount(pub Vec<u64>);

impl BadPlayCount {
    pub fn get(&self, arm: ArmId) -> u64 {
        self.0[arm.zero_based()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

pub fn regret_series(trace: &EpisodeTrace, env: &EnvironmentSpec) -> Result<RegretSeries> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(trace.records.len());
    for r in &trace.records {
        let (_, best) = env.best_arm(r.t)?;
        acc += best - env.mean_at(r.t, r.arm)?;
        out.push(acc);
    }
    Ok(RegretSeries(out))
}

pub fn bad_play_count(trace: &EpisodeTrace, env: &EnvironmentSpec) -> Result<BadPlayCount> {
    let mut counts = vec![0u64; env.arms()];
    for r in &trace.records {
        let (best, _) = env.best_arm(r.t)?;
        if r.arm != best {
            counts[r.arm.zero_based()] += 1;
        }
    }
    Ok(BadPlayCount(counts))
}

/// Running frequency `f_t = (1/t) sum_{s<=t} 1{I_s = arm}`.
pub fn arm_frequency(trace: &EpisodeTrace, arm: ArmId) -> Vec<f64> {
    let mut hits = 0u64;
    trace
        .records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            if r.arm == arm {
                hits += 1;
            }
            hits as f64 / (k + 1) as f64
        })
        .collect()
}

/// Everything the aggregate needs from one trace; lets the runner drop
/// traces as soon as an episode finishes.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub replication: u64,
    pub regret: RegretSeries,
    pub frequency: Vec<f64>,
    pub bad_plays: BadPlayCount,
    /// `sum_t mu_t(*) - X_t`, the realized-reward counterpart of the final
    /// regret. Diagnostic only.
    pub realized_regret: f64,
}

impl EpisodeSummary {
    pub fn from_trace(trace: &EpisodeTrace, env: &EnvironmentSpec, arm: ArmId) -> Result<Self> {
        let realized = trace.records.iter().map(|r| r.oracle_mean - r.reward).sum();
        Ok(Self {
            replication: trace.replication,
            regret: regret_series(trace, env)?,
            frequency: arm_frequency(trace, arm),
            bad_plays: bad_play_count(trace, env)?,
            realized_regret: realized,
        })
    }
}

/// Cross-replication statistics for one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSummary {
    pub policy: String,
    pub horizon: u64,
    pub replications: usize,
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    pub mean_frequency: Vec<f64>,
    pub mean_bad_plays: Vec<f64>,
    pub mean_realized_regret: f64,
}

impl AggregateSummary {
    pub fn final_mean_regret(&self) -> f64 {
        self.mean_regret.last().copied().unwrap_or(0.0)
    }

    pub fn final_stderr(&self) -> f64 {
        self.stderr_regret.last().copied().unwrap_or(0.0)
    }
}

/// Mean and standard error (unbiased sample sd over sqrt(n)).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    (mean, sd / (n as f64).sqrt())
}

pub fn aggregate_summaries(policy: &str, summaries: &[EpisodeSummary]) -> Result<AggregateSummary> {
    let first = summaries
        .first()
        .ok_or_else(|| config_err("cannot aggregate zero replications"))?;
    let horizon = first.regret.0.len();
    let arms = first.bad_plays.0.len();
    if summaries.iter().any(|s| {
        s.regret.0.len() != horizon || s.frequency.len() != horizon || s.bad_plays.0.len() != arms
    }) {
        return Err(config_err("replications disagree on horizon or arm count"));
    }
    let n = summaries.len() as f64;
    let mut mean_regret = Vec::with_capacity(horizon);
    let mut stderr_regret = Vec::with_capacity(horizon);
    let mut mean_frequency = Vec::with_capacity(horizon);
    let mut column = Vec::with_capacity(summaries.len());
    for t in 0..horizon {
        column.clear();
        column.extend(summaries.iter().map(|s| s.regret.0[t]));
        let (m, se) = mean_and_stderr(&column);
        mean_regret.push(m);
        stderr_regret.push(se);
        mean_frequency.push(summaries.iter().map(|s| s.frequency[t]).sum::<f64>() / n);
    }
    let mean_bad_plays = (0..arms)
        .map(|a| {
            summaries
                .iter()
                .map(|s| s.bad_plays.0[a] as f64)
                .sum::<f64>()
                / n
        })
        .collect();
    Ok(AggregateSummary {
        policy: policy.to_string(),
        horizon: horizon as u64,
        replications: summaries.len(),
        mean_regret,
        stderr_regret,
        mean_frequency,
        mean_bad_plays,
        mean_realized_regret: summaries.iter().map(|s| s.realized_regret).sum::<f64>() / n,
    })
}

/// Aggregate complete traces of one policy.
pub fn aggregate(
    traces: &[EpisodeTrace],
    env: &EnvironmentSpec,
    arm: ArmId,
) -> Result<AggregateSummary> {
    let first = traces
        .first()
        .ok_or_else(|| config_err("cannot aggregate zero traces"))?;
    if traces.iter().any(|t| t.horizon() != first.horizon()) {
        return Err(config_err("traces have inconsistent horizons"));
    }
    if traces.iter().any(|t| t.policy_name != first.policy_name) {
        return Err(config_err("traces come from different policies"));
    }
    let summaries = traces
        .iter()
        .map(|t| EpisodeSummary::from_trace(t, env, arm))
        .collect::<Result<Vec<_>>>()?;
    aggregate_summaries(&first.policy_name, &summaries)
}
