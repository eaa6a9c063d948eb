//! Period-shifted environments and the mixture regret of a policy.
//!
//! The base environment is stationary with arm 1 optimal. Modification `j`
//! raises arm `K` to `nu > mu(1)` during the `j`-th block of `tau_p`
//! rounds; the mixture draws `j` uniformly from `1..=M`, `M = floor(T/tau_p)`.

use std::sync::Arc;

use serde::Serialize;

use crate::accounting::{mean_and_stderr, regret_series};
use crate::env::{EnvironmentSpec, PiecewiseConstantBernoulli, Segment};
use crate::episode::run_replications;
use crate::error::{config_err, domain_err, Result};
use crate::policy::{PolicyKind, PolicySpec};
use crate::types::{ArmId, EpisodeConfig};

fn xlogx_over(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// `KL(Bernoulli(p) || Bernoulli(q))`, natural log, `0 ln 0 = 0`.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(domain_err(
            "kl_bernoulli",
            format!("p={p}, q={q} outside [0,1]"),
        ));
    }
    if (q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0) {
        return Err(domain_err(
            "kl_bernoulli",
            format!("KL({p} || {q}) is infinite"),
        ));
    }
    Ok((xlogx_over(p, q) + xlogx_over(1.0 - p, 1.0 - q)).max(0.0))
}

/// How the block length `tau_p` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PeriodChoice {
    /// Fixed block length.
    Length { rounds: u64 },
    /// `tau_p = floor(T / count)`, so that `M = count` when it divides `T`.
    Count { count: u64 },
    /// `tau_p = 16 T / (9 alpha E[N_T(K)])`, with `E[N_T(K)]` estimated on
    /// the base environment.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundConfig {
    pub base_means: Vec<f64>,
    pub nu: f64,
    pub period: PeriodChoice,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
}

impl LowerBoundConfig {
    pub fn arms(&self) -> usize {
        self.base_means.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.arms();
        if k < 2 {
            return Err(config_err(
                "lower-bound construction needs at least two arms",
            ));
        }
        if self.base_means.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(config_err("base means must lie in [0,1]"));
        }
        let mu1 = self.base_means[0];
        if self.base_means[1..].iter().any(|&m| m >= mu1) {
            return Err(config_err(
                "arm 1 must be strictly best in the base environment",
            ));
        }
        if !(self.nu > mu1 && self.nu <= 1.0) {
            return Err(config_err(format!(
                "nu must lie in (mu(1), 1], got {}",
                self.nu
            )));
        }
        if self.horizon == 0 || self.replications == 0 {
            return Err(config_err("horizon and replications must be positive"));
        }
        match self.period {
            PeriodChoice::Length { rounds } if rounds == 0 || rounds > self.horizon => {
                Err(config_err("period length must lie in 1..=T"))
            }
            PeriodChoice::Count { count } if count == 0 || count > self.horizon => {
                Err(config_err("period count must lie in 1..=T"))
            }
            _ => Ok(()),
        }
    }

    /// `delta = nu - mu(1)`.
    pub fn delta(&self) -> f64 {
        self.nu - self.base_means[0]
    }

    /// `alpha = KL(P_K || Q)`.
    pub fn alpha(&self) -> Result<f64> {
        kl_bernoulli(self.base_means[self.arms() - 1], self.nu)
    }

    /// `C(mu) = 32 delta (mu(1) - mu(K)) / (27 alpha)`.
    pub fn c_mu(&self) -> Result<f64> {
        let gap = self.base_means[0] - self.base_means[self.arms() - 1];
        Ok(32.0 * self.delta() * gap / (27.0 * self.alpha()?))
    }

    pub fn base_env(&self) -> Result<EnvironmentSpec> {
        Ok(PiecewiseConstantBernoulli::constant(self.horizon, &self.base_means)?.into())
    }

    /// Block length for a fixed choice; `None` in auto mode.
    pub fn fixed_period(&self) -> Option<u64> {
        match self.period {
            PeriodChoice::Length { rounds } => Some(rounds),
            PeriodChoice::Count { count } => Some((self.horizon / count).max(1)),
            PeriodChoice::Auto => None,
        }
    }
}

/// Base environment with arm `K` at `nu` on rounds `(j-1) tau_p + 1 ..= j tau_p`.
pub fn modified_env(config: &LowerBoundConfig, period: u64, j: u64) -> Result<EnvironmentSpec> {
    config.validate()?;
    if period == 0 || period > config.horizon {
        return Err(config_err("period length must lie in 1..=T"));
    }
    let blocks = config.horizon / period;
    if j == 0 || j > blocks {
        return Err(config_err(format!("period index {j} outside 1..={blocks}")));
    }
    let k = config.arms();
    let base = config.base_means[k - 1];
    let first = (j - 1) * period + 1;
    let last = j * period;
    let mut schedule = Vec::with_capacity(3);
    if first > 1 {
        schedule.push(Segment { start: 1, p: base });
    }
    schedule.push(Segment {
        start: first,
        p: config.nu,
    });
    if last < config.horizon {
        schedule.push(Segment {
            start: last + 1,
            p: base,
        });
    }
    let mut arms: Vec<Vec<Segment>> = config.base_means[..k - 1]
        .iter()
        .map(|&p| vec![Segment { start: 1, p }])
        .collect();
    arms.push(schedule);
    Ok(PiecewiseConstantBernoulli::new(config.horizon, arms)?.into())
}

/// Final regret of one episode; `j = 0` is the base environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundEpisode {
    pub j: u64,
    pub replication: u64,
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureRegretReport {
    pub policy: String,
    pub kind: PolicyKind,
    /// Whether the policy only sees its own rewards. The oracle does not.
    pub admissible: bool,
    pub horizon: u64,
    pub period: u64,
    pub blocks: u64,
    pub replications: u64,
    pub base_regret: f64,
    pub base_regret_stderr: f64,
    pub mixture_regret: f64,
    pub mixture_regret_stderr: f64,
    /// Mean final regret on each modified environment, `j = 1..=M`.
    pub per_block_regret: Vec<f64>,
    /// `E[N_T(K)]` on the base environment.
    pub base_plays_k: f64,
    pub alpha: f64,
    pub c_mu: f64,
    /// `C(mu) T / E[R_T]`; `None` when the base regret is zero.
    pub theorem_bound: Option<f64>,
    /// `sqrt(C(mu) T)`.
    pub corollary_bound: f64,
    /// `64/(9 alpha) <= E[N_T(K)] <= T/(4 alpha)`.
    pub precondition_64: bool,
    /// `16/(9 alpha) <= E[N_T(K)] <= T/alpha`.
    pub precondition_16: bool,
    pub episodes: Vec<LowerBoundEpisode>,
}

impl MixtureRegretReport {
    /// `max(E[R_T], E*[R_T])` and the standard error of the larger term.
    pub fn corollary_max(&self) -> (f64, f64) {
        if self.base_regret >= self.mixture_regret {
            (self.base_regret, self.base_regret_stderr)
        } else {
            (self.mixture_regret, self.mixture_regret_stderr)
        }
    }

    /// Corollary check with `z` standard errors of slack. `None` for
    /// policies outside the theorem's class.
    pub fn corollary_holds(&self, z: f64) -> Option<bool> {
        if !self.admissible {
            return None;
        }
        let (value, se) = self.corollary_max();
        Some(value >= self.corollary_bound - z * se)
    }

    /// `E*[R_T] >= C(mu) T / E[R_T]` within `z` standard errors, evaluated
    /// only when the policy is admissible and the displayed precondition holds.
    pub fn theorem_holds(&self, z: f64) -> Option<bool> {
        match self.theorem_bound {
            Some(bound) if self.admissible && self.precondition_64 => {
                Some(self.mixture_regret >= bound - z * self.mixture_regret_stderr)
            }
            _ => None,
        }
    }
}

struct EpisodeStats {
    regret: f64,
    plays_k: u64,
}

fn run_env(
    config: &LowerBoundConfig,
    env: EnvironmentSpec,
    spec: &PolicySpec,
    suffix: &str,
) -> Result<Vec<EpisodeStats>> {
    let k = config.arms();
    let episode = EpisodeConfig::new(k, config.horizon, 1.0, config.seed, config.replications)?;
    let env = Arc::new(env);
    let last = ArmId::new(k, k)?;
    let env_ref = Arc::clone(&env);
    run_replications(&episode, &env, spec, suffix, move |trace| {
        let regret = regret_series(&trace, &env_ref)?.final_value();
        let plays_k = trace.plays().filter(|&a| a == last).count() as u64;
        Ok(EpisodeStats { regret, plays_k })
    })
}

/// Run `spec` on the base environment and on every modification.
pub fn mixture_regret(spec: &PolicySpec, config: &LowerBoundConfig) -> Result<MixtureRegretReport> {
    config.validate()?;
    let alpha = config.alpha()?;
    let c_mu = config.c_mu()?;
    let t = config.horizon as f64;

    let base = run_env(config, config.base_env()?, spec, "-lb-base")?;
    let base_regrets: Vec<f64> = base.iter().map(|s| s.regret).collect();
    let (base_regret, base_regret_stderr) = mean_and_stderr(&base_regrets);
    let base_plays_k = base.iter().map(|s| s.plays_k as f64).sum::<f64>() / base.len() as f64;

    let period = match config.fixed_period() {
        Some(p) => p,
        None => {
            let raw = 16.0 * t / (9.0 * alpha * base_plays_k.max(f64::MIN_POSITIVE));
            (raw.round() as u64).clamp(1, config.horizon)
        }
    };
    let blocks = config.horizon / period;

    let mut episodes: Vec<LowerBoundEpisode> = base_regrets
        .iter()
        .enumerate()
        .map(|(r, &regret)| LowerBoundEpisode {
            j: 0,
            replication: r as u64,
            regret,
        })
        .collect();
    let reps = config.replications as usize;
    let mut per_block_regret = Vec::with_capacity(blocks as usize);
    let mut per_rep_mixture = vec![0.0; reps];
    for j in 1..=blocks {
        let stats = run_env(
            config,
            modified_env(config, period, j)?,
            spec,
            &format!("-lb-j{j}"),
        )?;
        let mut total = 0.0;
        for (r, s) in stats.iter().enumerate() {
            total += s.regret;
            per_rep_mixture[r] += s.regret / blocks as f64;
            episodes.push(LowerBoundEpisode {
                j,
                replication: r as u64,
                regret: s.regret,
            });
        }
        per_block_regret.push(total / reps as f64);
    }
    let mixture_regret = per_block_regret.iter().sum::<f64>() / blocks as f64;
    let (_, mixture_regret_stderr) = mean_and_stderr(&per_rep_mixture);

    let dummy = Arc::new(config.base_env()?);
    let kind = spec.build(&dummy, 1.0)?.kind();
    let n = base_plays_k;
    Ok(MixtureRegretReport {
        policy: spec.label(),
        kind,
        admissible: kind != PolicyKind::Clairvoyant,
        horizon: config.horizon,
        period,
        blocks,
        replications: config.replications,
        base_regret,
        base_regret_stderr,
        mixture_regret,
        mixture_regret_stderr,
        per_block_regret,
        base_plays_k,
        alpha,
        c_mu,
        theorem_bound: (base_regret > 0.0).then(|| c_mu * t / base_regret),
        corollary_bound: (c_mu * t).sqrt(),
        precondition_64: 64.0 / (9.0 * alpha) <= n && n <= t / (4.0 * alpha),
        precondition_16: 16.0 / (9.0 * alpha) <= n && n <= t / alpha,
        episodes,
    })
}

/// One row of a horizon scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub horizon: u64,
    pub mixture_regret: f64,
    pub base_plays_k: f64,
    /// `E*[R_T] ln T / T`.
    pub ratio: f64,
}

/// Mixture regret of `spec` across a grid of horizons. Every other field of
/// `config` is kept; the period choice is re-applied at each horizon.
pub fn mixture_scan(
    spec: &PolicySpec,
    config: &LowerBoundConfig,
    horizons: &[u64],
) -> Result<Vec<ScanRow>> {
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err("horizon grid must be strictly increasing"));
    }
    horizons
        .iter()
        .map(|&horizon| {
            let cfg = LowerBoundConfig {
                horizon,
                ..config.clone()
            };
            let report = mixture_regret(spec, &cfg)?;
            let t = horizon as f64;
            Ok(ScanRow {
                horizon,
                mixture_regret: report.mixture_regret,
                base_plays_k: report.base_plays_k,
                ratio: report.mixture_regret * t.ln() / t,
            })
        })
        .collect()
}

/// [`mixture_scan`] for UCB-1 with exploration parameter `xi`.
pub fn ucb1_mixture_scan(
    config: &LowerBoundConfig,
    horizons: &[u64],
    xi: f64,
) -> Result<Vec<ScanRow>> {
    mixture_scan(&PolicySpec::Ucb1 { xi, label: None }, config, horizons)
}
