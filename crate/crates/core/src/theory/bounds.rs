//! Bad-play bounds for D-UCB and SW-UCB.
//!
//! Both bounds are stated for `xi > 1/2` and use the grid parameter
//! `eta = 4 sqrt(1 - 1/(2 xi))`, which makes `2 xi (1 - eta^2/16) = 1`.
//! Logarithms are natural.

use std::f64::consts::E;

use serde::Serialize;

use super::{ceil_tolerant, discounted_horizon};
use crate::error::{domain_err, Result};

/// The grid parameter paired with `xi`.
pub fn eta_for_xi(xi: f64) -> Result<f64> {
    if !(xi > 0.5 && xi.is_finite()) {
        return Err(domain_err(
            "eta(xi)",
            format!("xi must exceed 1/2, got {xi}"),
        ));
    }
    Ok(4.0 * (1.0 - 1.0 / (2.0 * xi)).sqrt())
}

fn check_common(xi: f64, reward_bound: f64, gap: f64, horizon: u64) -> Result<()> {
    if !(xi > 0.5 && xi.is_finite()) {
        return Err(domain_err(
            "regret bound",
            format!("xi must exceed 1/2, got {xi}"),
        ));
    }
    if !(reward_bound > 0.0) {
        return Err(domain_err("regret bound", "reward bound must be positive"));
    }
    if !(gap > 0.0) {
        return Err(domain_err(
            "regret bound",
            format!("gap must be positive, got {gap}"),
        ));
    }
    if horizon == 0 {
        return Err(domain_err("regret bound", "horizon must be positive"));
    }
    Ok(())
}

/// Inputs of the D-UCB bound for one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DucbBoundParams {
    pub gamma: f64,
    pub xi: f64,
    pub reward_bound: f64,
    pub horizon: u64,
    pub breakpoints: u64,
    /// `Delta mu_T(i)` of the arm being bounded.
    pub gap: f64,
    pub arms: usize,
}

impl DucbBoundParams {
    pub fn validate(&self) -> Result<()> {
        check_common(self.xi, self.reward_bound, self.gap, self.horizon)?;
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(domain_err(
                "D-UCB bound",
                format!("gamma must lie in (0,1), got {}", self.gamma),
            ));
        }
        if self.arms < 2 {
            return Err(domain_err("D-UCB bound", "need at least two arms"));
        }
        Ok(())
    }

    pub fn eta(&self) -> Result<f64> {
        eta_for_xi(self.xi)
    }
}

/// `A(gamma) = 16 B^2 xi ln n_T(gamma) / Delta^2`, log clamped at 0.
pub fn ducb_a(p: &DucbBoundParams) -> Result<f64> {
    p.validate()?;
    let n = discounted_horizon(p.gamma, p.horizon);
    let log_n = if n > 1.0 { n.ln() } else { 0.0 };
    Ok(16.0 * p.reward_bound.powi(2) * p.xi * log_n / p.gap.powi(2))
}

/// `D(gamma) = ln((1 - gamma) xi ln n_K(gamma)) / ln gamma`, unclamped.
/// Can be negative when the inner argument exceeds 1.
pub fn ducb_d(p: &DucbBoundParams) -> Result<f64> {
    p.validate()?;
    let n_k = discounted_horizon(p.gamma, p.arms as u64);
    let arg = (1.0 - p.gamma) * p.xi * n_k.ln();
    if !(arg > 0.0) {
        return Err(domain_err(
            "D(gamma)",
            format!("log argument {arg} is not positive"),
        ));
    }
    Ok(arg.ln() / p.gamma.ln())
}

/// Evaluated D-UCB bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DucbBoundReport {
    pub params: DucbBoundParams,
    pub eta: f64,
    pub a: f64,
    pub d: f64,
    pub b: f64,
    /// `C(gamma)`, after clamping.
    pub c: f64,
    /// `D(gamma)` was negative and the breakpoint term was clamped to 0.
    pub clamped: bool,
    /// Right-hand side bounding `E[N~_i(T)]`.
    pub rhs: f64,
    /// `rhs > T`, i.e. the bound says nothing.
    pub vacuous: bool,
}

impl DucbBoundReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("eta", self.eta),
            ("A(gamma)", self.a),
            ("D(gamma)", self.d),
            ("B(gamma)", self.b),
            ("C(gamma)", self.c),
            ("rhs", self.rhs),
        ]
    }
}

/// `B(gamma)`, `C(gamma)` and the full bound on the expected number of bad
/// plays of one arm.
pub fn ducb_regret_bound(p: &DucbBoundParams) -> Result<DucbBoundReport> {
    p.validate()?;
    let eta = p.eta()?;
    let a = ducb_a(p)?;
    let d = ducb_d(p)?;
    let gamma = p.gamma;
    let t = p.horizon as f64;
    let one_minus = 1.0 - gamma;
    let neg_log = -one_minus.ln();
    // gamma^(1/(1-gamma)) -> 1/e as gamma -> 1
    let g_pow = (gamma.ln() / one_minus).exp();
    let b_sq = p.reward_bound * p.reward_bound;

    let ceil_ratio = ceil_tolerant(t * one_minus) / (t * one_minus);
    let first = 16.0 * b_sq * p.xi / (g_pow * p.gap * p.gap) * ceil_ratio;
    let second = 2.0 * ceil_tolerant(neg_log / (1.0 + eta).ln()) / (neg_log * (1.0 - g_pow));
    let b = first + second;

    let clamped = d < 0.0;
    let d_used = d.max(0.0);
    // C(gamma) * ln(1/(1-gamma)) / (1-gamma) == D(gamma)
    let c = d_used * one_minus / neg_log;

    let rhs = b * t * one_minus * neg_log + c * p.breakpoints as f64 / one_minus * neg_log;
    Ok(DucbBoundReport {
        params: *p,
        eta,
        a,
        d,
        b,
        c,
        clamped,
        rhs,
        vacuous: rhs > t,
    })
}

/// Value of `B(gamma)` as `gamma -> 1`.
pub fn ducb_b_limit(xi: f64, reward_bound: f64, gap: f64) -> Result<f64> {
    let eta = eta_for_xi(xi)?;
    Ok(16.0 * E * reward_bound * reward_bound * xi / (gap * gap)
        + 2.0 / ((1.0 - 1.0 / E) * (1.0 + eta).ln()))
}

/// Inputs of the SW-UCB bound for one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwucbBoundParams {
    pub window: u64,
    pub xi: f64,
    pub reward_bound: f64,
    pub horizon: u64,
    pub breakpoints: u64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwucbBoundReport {
    pub params: SwucbBoundParams,
    pub eta: f64,
    /// `A(tau) = 4 B^2 xi ln tau / Delta^2`.
    pub a: f64,
    pub c: f64,
    pub rhs: f64,
    pub vacuous: bool,
}

impl SwucbBoundReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("eta", self.eta),
            ("A(tau)", self.a),
            ("C(tau)", self.c),
            ("rhs", self.rhs),
        ]
    }
}

/// `C(tau) T ln tau / tau + tau Upsilon_T + ln^2 tau`.
pub fn swucb_regret_bound(p: &SwucbBoundParams) -> Result<SwucbBoundReport> {
    check_common(p.xi, p.reward_bound, p.gap, p.horizon)?;
    if p.window < 2 {
        return Err(domain_err(
            "SW-UCB bound",
            format!("window must be at least 2, got {}", p.window),
        ));
    }
    let eta = eta_for_xi(p.xi)?;
    let tau = p.window as f64;
    let t = p.horizon as f64;
    let log_tau = tau.ln();
    let b_sq = p.reward_bound * p.reward_bound;
    let ratio = t / tau;
    let c = 4.0 * b_sq * p.xi / (p.gap * p.gap) * ceil_tolerant(ratio) / ratio
        + 2.0 / log_tau * ceil_tolerant(log_tau / (1.0 + eta).ln());
    let rhs = c * t * log_tau / tau + tau * p.breakpoints as f64 + log_tau * log_tau;
    Ok(SwucbBoundReport {
        params: *p,
        eta,
        a: 4.0 * b_sq * p.xi * log_tau / (p.gap * p.gap),
        c,
        rhs,
        vacuous: rhs > t,
    })
}

/// Value of `C(tau)` as `tau -> infinity`.
pub fn swucb_c_limit(xi: f64, reward_bound: f64, gap: f64) -> Result<f64> {
    let eta = eta_for_xi(xi)?;
    Ok(4.0 * reward_bound * reward_bound * xi / (gap * gap) + 2.0 / (1.0 + eta).ln())
}

/// A measured mean set against a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalComparison {
    pub empirical: f64,
    pub stderr: f64,
    pub replications: usize,
    pub bound: f64,
    pub vacuous: bool,
    /// `None` for vacuous bounds, which are reported but never judged.
    pub holds: Option<bool>,
}

impl EmpiricalComparison {
    pub fn new(empirical: f64, stderr: f64, replications: usize, bound: f64, horizon: u64) -> Self {
        let vacuous = bound > horizon as f64;
        Self {
            empirical,
            stderr,
            replications,
            bound,
            vacuous,
            holds: (!vacuous).then_some(empirical <= bound),
        }
    }
}
