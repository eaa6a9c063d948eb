//! Self-normalized deviation bounds for discounted sums with a random
//! number of summands.
//!
//! With i.i.d. `X_s` in `[0, B]`, a previsible selection sequence
//! `eps_s in {0, 1}` and a discount `gamma`:
//!
//! ```text
//! R_t  = sum_s gamma^(t-s) X_s  eps_s
//! ER_t = sum_s gamma^(t-s) mu   eps_s
//! N2_t = sum_s gamma^(2(t-s))   eps_s
//! ```
//!
//! and the deviation of interest is `(R_t - ER_t) / sqrt(N2_t)`.

use rayon::prelude::*;
use serde::Serialize;

use super::{ceil_tolerant, discounted_horizon};
use crate::error::{domain_err, Result};
use crate::rng::derive_stream;

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(domain_err(
            "deviation bound",
            format!("eta must be positive, got {eta}"),
        ));
    }
    Ok(())
}

fn check_bound(b: f64) -> Result<()> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(domain_err(
            "deviation bound",
            format!("B must be positive, got {b}"),
        ));
    }
    Ok(())
}

/// `max(1, ceil(log_arg / ln(1 + eta)))`. A factor of zero would turn a
/// degenerate case into a probability bound of 0, so it is clamped.
pub fn ceiling_factor(log_arg: f64, eta: f64) -> f64 {
    ceil_tolerant(log_arg.max(0.0) / (1.0 + eta).ln()).max(1.0)
}

fn hoeffding_exponent(delta: f64, eta: f64, b: f64) -> f64 {
    (-2.0 * delta * delta / (b * b) * (1.0 - eta * eta / 16.0)).exp()
}

/// `ceil(ln n / ln(1+eta)) exp(-(2 delta^2 / B^2)(1 - eta^2/16))`, with `n`
/// the discounted horizon `n_t(gamma)`.
pub fn deviation_bound(delta: f64, eta: f64, b: f64, n: f64) -> Result<f64> {
    check_eta(eta)?;
    check_bound(b)?;
    if !(n >= 1.0) {
        return Err(domain_err(
            "deviation bound",
            format!("n_t(gamma) must be at least 1, got {n}"),
        ));
    }
    Ok(ceiling_factor(n.ln(), eta) * hoeffding_exponent(delta, eta, b))
}

/// The tighter form `ceil(...) exp(-8 delta^2 / (B^2 ((1+eta)^(1/4) + (1+eta)^(-1/4))^2))`.
pub fn sharper_deviation_bound(delta: f64, eta: f64, b: f64, n: f64) -> Result<f64> {
    check_eta(eta)?;
    check_bound(b)?;
    if !(n >= 1.0) {
        return Err(domain_err(
            "deviation bound",
            format!("n_t(gamma) must be at least 1, got {n}"),
        ));
    }
    let q = (1.0 + eta).powf(0.25);
    let s = q + 1.0 / q;
    Ok(ceiling_factor(n.ln(), eta) * (-8.0 * delta * delta / (b * b * s * s)).exp())
}

/// `ln(gamma^(-2T) n_T(gamma^2))`, evaluated in log space.
pub fn maximal_log_factor(gamma: f64, horizon: u64) -> f64 {
    if gamma == 1.0 {
        (horizon as f64).ln()
    } else {
        -2.0 * horizon as f64 * gamma.ln() + discounted_horizon(gamma * gamma, horizon).ln()
    }
}

/// Bound on `P(sup_{t <= T} deviation_t > delta)`.
pub fn maximal_bound(delta: f64, eta: f64, b: f64, gamma: f64, horizon: u64) -> Result<f64> {
    check_eta(eta)?;
    check_bound(b)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(domain_err(
            "maximal bound",
            format!("gamma must lie in (0,1], got {gamma}"),
        ));
    }
    if horizon == 0 {
        return Err(domain_err("maximal bound", "horizon must be positive"));
    }
    Ok(ceiling_factor(maximal_log_factor(gamma, horizon), eta) * hoeffding_exponent(delta, eta, b))
}

/// Deviation bound for a window of the last `window` rounds at time `t`.
pub fn windowed_deviation_bound(delta: f64, eta: f64, b: f64, t: u64, window: u64) -> Result<f64> {
    check_eta(eta)?;
    check_bound(b)?;
    if t == 0 || window == 0 {
        return Err(domain_err(
            "windowed deviation bound",
            "t and window must be positive",
        ));
    }
    let m = t.min(window) as f64;
    Ok(ceiling_factor(m.ln(), eta) * hoeffding_exponent(delta, eta, b))
}

/// Previsible selection rule: `eps_t` depends on `X_1 .. X_{t-1}` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SelectionRule {
    /// `eps_t = 1` for every `t`.
    Always,
    /// `eps_t = 1` iff the mean of all past observations is below
    /// `threshold` (and `eps_1 = 1`).
    RunningMeanBelow { threshold: f64 },
}

impl SelectionRule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Always => "always",
            Self::RunningMeanBelow { .. } => "running_mean_below",
        }
    }

    fn select(&self, past_sum: f64, past_len: u64) -> bool {
        match *self {
            Self::Always => true,
            Self::RunningMeanBelow { threshold } => {
                past_len == 0 || past_sum / (past_len as f64) < threshold
            }
        }
    }
}

/// A stream of i.i.d. `B * Bernoulli(p)` variables with a selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamSpec {
    pub success_probability: f64,
    pub reward_bound: f64,
    pub rule: SelectionRule,
    pub eta: f64,
}

impl StreamSpec {
    pub fn mean(&self) -> f64 {
        self.success_probability * self.reward_bound
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.success_probability) {
            return Err(domain_err("stream", "success probability outside [0,1]"));
        }
        check_bound(self.reward_bound)?;
        check_eta(self.eta)
    }
}

/// Final and running-supremum deviation of one simulated path. `None`
/// where nothing has been selected yet.
fn simulate_path(
    spec: &StreamSpec,
    gamma: f64,
    horizon: u64,
    seed: u64,
    replication: u64,
) -> (Option<f64>, Option<f64>) {
    let mut rng = derive_stream(seed, replication, "concentration");
    let mu = spec.mean();
    let (mut r, mut er, mut n2) = (0.0f64, 0.0f64, 0.0f64);
    let g2 = gamma * gamma;
    let mut past_sum = 0.0;
    let mut sup: Option<f64> = None;
    let mut dev = None;
    for t in 0..horizon {
        let selected = spec.rule.select(past_sum, t);
        let x = if rng.bernoulli(spec.success_probability) {
            spec.reward_bound
        } else {
            0.0
        };
        r *= gamma;
        er *= gamma;
        n2 *= g2;
        if selected {
            r += x;
            er += mu;
            n2 += 1.0;
        }
        past_sum += x;
        if n2 > 0.0 {
            let d = (r - er) / n2.sqrt();
            dev = Some(d);
            sup = Some(sup.map_or(d, |s: f64| s.max(d)));
        }
    }
    (dev, sup)
}

/// Monte Carlo tail frequency next to its theoretical bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceedanceReport {
    pub gamma: f64,
    pub delta: f64,
    pub horizon: u64,
    pub replications: u64,
    pub exceedances: u64,
    pub empirical: f64,
    /// Binomial standard error `sqrt(p (1-p) / n)`.
    pub stderr: f64,
    pub bound: f64,
}

impl ExceedanceReport {
    fn new(
        gamma: f64,
        delta: f64,
        horizon: u64,
        replications: u64,
        exceedances: u64,
        bound: f64,
    ) -> Self {
        let p = exceedances as f64 / replications as f64;
        Self {
            gamma,
            delta,
            horizon,
            replications,
            exceedances,
            empirical: p,
            stderr: (p * (1.0 - p) / replications as f64).sqrt(),
            bound,
        }
    }

    /// `empirical <= bound + 3 stderr`.
    pub fn consistent(&self) -> bool {
        self.empirical <= self.bound + 3.0 * self.stderr
    }
}

fn count_exceedances(
    spec: &StreamSpec,
    gamma: f64,
    delta: f64,
    horizon: u64,
    replications: u64,
    seed: u64,
    use_sup: bool,
) -> Result<u64> {
    spec.validate()?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(domain_err(
            "exceedance estimate",
            format!("gamma must lie in (0,1], got {gamma}"),
        ));
    }
    if horizon == 0 || replications == 0 {
        return Err(domain_err(
            "exceedance estimate",
            "horizon and replications must be positive",
        ));
    }
    Ok((0..replications)
        .into_par_iter()
        .map(|rep| {
            let (last, sup) = simulate_path(spec, gamma, horizon, seed, rep);
            let value = if use_sup { sup } else { last };
            u64::from(value.is_some_and(|d| d > delta))
        })
        .sum())
}

/// Frequency of `(R_t - ER_t)/sqrt(N2_t) > delta` at `t = horizon`.
pub fn exceedance_estimate(
    spec: &StreamSpec,
    gamma: f64,
    delta: f64,
    horizon: u64,
    replications: u64,
    seed: u64,
) -> Result<ExceedanceReport> {
    let hits = count_exceedances(spec, gamma, delta, horizon, replications, seed, false)?;
    let bound = deviation_bound(
        delta,
        spec.eta,
        spec.reward_bound,
        discounted_horizon(gamma, horizon),
    )?;
    Ok(ExceedanceReport::new(
        gamma,
        delta,
        horizon,
        replications,
        hits,
        bound,
    ))
}

/// Frequency of `sup_{t <= horizon} (R_t - ER_t)/sqrt(N2_t) > delta`.
pub fn sup_exceedance_estimate(
    spec: &StreamSpec,
    gamma: f64,
    delta: f64,
    horizon: u64,
    replications: u64,
    seed: u64,
) -> Result<ExceedanceReport> {
    let hits = count_exceedances(spec, gamma, delta, horizon, replications, seed, true)?;
    let bound = maximal_bound(delta, spec.eta, spec.reward_bound, gamma, horizon)?;
    Ok(ExceedanceReport::new(
        gamma,
        delta,
        horizon,
        replications,
        hits,
        bound,
    ))
}
