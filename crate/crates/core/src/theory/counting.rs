//! Deterministic counting bounds on play sequences.
//!
//! Sequences hold 1-based arm labels. The windowed count at round `t` is
//! the number of plays of arm `i` in rounds `t - tau + 1 ..= t`, the
//! discounted count is `sum_{s <= t} gamma^(t-s) 1{I_s = i}`; both include
//! round `t` itself.

use rand::Rng;
use serde::Serialize;

use super::ceil_tolerant;
use crate::error::{domain_err, Result};
use crate::rng::derive_stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountingCheck {
    pub lhs: u64,
    /// Bound without the factor `K`; `holds` compares against this one.
    pub rhs: f64,
    /// Bound with the factor `K`.
    pub rhs_with_arms: f64,
    pub holds: bool,
}

fn check_sequence(sequence: &[usize], arms: usize, arm: usize) -> Result<()> {
    if arms == 0 || arm == 0 || arm > arms {
        return Err(domain_err(
            "counting check",
            format!("arm {arm} outside 1..={arms}"),
        ));
    }
    if let Some(bad) = sequence.iter().find(|&&a| a == 0 || a > arms) {
        return Err(domain_err(
            "counting check",
            format!("sequence contains arm {bad}"),
        ));
    }
    Ok(())
}

fn blocks(horizon: usize, window: usize) -> f64 {
    ceil_tolerant(horizon as f64 / window as f64)
}

/// `sum_t 1{I_t = i, windowed count < m}` against `ceil(T/tau) m`.
pub fn counting_lemma_check(
    sequence: &[usize],
    arms: usize,
    window: usize,
    m: f64,
    arm: usize,
) -> Result<CountingCheck> {
    check_sequence(sequence, arms, arm)?;
    if window == 0 {
        return Err(domain_err("counting lemma", "tau must be at least 1"));
    }
    if !(m > 0.0) {
        return Err(domain_err(
            "counting lemma",
            format!("m must be positive, got {m}"),
        ));
    }
    let mut lhs = 0u64;
    let mut in_window = 0usize;
    for (t, &a) in sequence.iter().enumerate() {
        if a == arm {
            in_window += 1;
        }
        if t >= window && sequence[t - window] == arm {
            in_window -= 1;
        }
        if a == arm && (in_window as f64) < m {
            lhs += 1;
        }
    }
    let rhs = blocks(sequence.len(), window) * m;
    Ok(CountingCheck {
        lhs,
        rhs,
        rhs_with_arms: arms as f64 * rhs,
        holds: lhs as f64 <= rhs,
    })
}

/// `sum_t 1{I_t = i, discounted count < A}` against `ceil(T/tau) A gamma^(-tau)`.
pub fn counting_corollary_check(
    sequence: &[usize],
    arms: usize,
    gamma: f64,
    window: usize,
    a: f64,
    arm: usize,
) -> Result<CountingCheck> {
    check_sequence(sequence, arms, arm)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain_err(
            "counting corollary",
            format!("gamma must lie in (0,1), got {gamma}"),
        ));
    }
    if window == 0 {
        return Err(domain_err("counting corollary", "tau must be at least 1"));
    }
    if !(a > 0.0) {
        return Err(domain_err(
            "counting corollary",
            format!("A must be positive, got {a}"),
        ));
    }
    let mut lhs = 0u64;
    let mut count = 0.0;
    for &played in sequence {
        count *= gamma;
        if played == arm {
            count += 1.0;
            if count < a {
                lhs += 1;
            }
        }
    }
    let rhs = blocks(sequence.len(), window) * a * gamma.powi(-(window as i32));
    Ok(CountingCheck {
        lhs,
        rhs,
        rhs_with_arms: arms as f64 * rhs,
        holds: lhs as f64 <= rhs,
    })
}

/// Outcome of a sweep over many sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub sequences: u64,
    pub max_lhs: u64,
    pub violations: u64,
}

impl SweepSummary {
    fn new() -> Self {
        Self {
            sequences: 0,
            max_lhs: 0,
            violations: 0,
        }
    }

    fn record(&mut self, check: &CountingCheck) {
        self.sequences += 1;
        self.max_lhs = self.max_lhs.max(check.lhs);
        self.violations += u64::from(!check.holds);
    }
}

/// Calls `visit` on all `arms^horizon` sequences, in lexicographic order.
pub fn for_each_sequence(arms: usize, horizon: usize, mut visit: impl FnMut(&[usize])) {
    if arms == 0 {
        return;
    }
    let mut seq = vec![1usize; horizon];
    loop {
        visit(&seq);
        let mut pos = horizon;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if seq[pos] < arms {
                seq[pos] += 1;
                break;
            }
            seq[pos] = 1;
        }
    }
}

/// Counting lemma over every sequence of length `horizon`, for every arm.
pub fn exhaustive_lemma_check(
    arms: usize,
    horizon: usize,
    window: usize,
    m: f64,
) -> Result<SweepSummary> {
    if arms == 0 {
        return Err(domain_err("counting lemma", "need at least one arm"));
    }
    let mut summary = SweepSummary::new();
    let mut failure = None;
    for_each_sequence(arms, horizon, |seq| {
        for arm in 1..=arms {
            match counting_lemma_check(seq, arms, window, m, arm) {
                Ok(c) => summary.record(&c),
                Err(e) => failure = Some(e),
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

/// Counting corollary on `count` uniformly random sequences.
pub fn randomized_corollary_check(
    arms: usize,
    horizon: usize,
    gamma: f64,
    window: usize,
    a: f64,
    count: u64,
    seed: u64,
) -> Result<SweepSummary> {
    if arms == 0 {
        return Err(domain_err("counting corollary", "need at least one arm"));
    }
    let mut rng = derive_stream(seed, 0, "counting");
    let mut summary = SweepSummary::new();
    let mut seq = vec![0usize; horizon];
    for _ in 0..count {
        for slot in seq.iter_mut() {
            *slot = rng.gen_range(1..=arms);
        }
        for arm in 1..=arms {
            summary.record(&counting_corollary_check(
                &seq, arms, gamma, window, a, arm,
            )?);
        }
    }
    Ok(summary)
}
