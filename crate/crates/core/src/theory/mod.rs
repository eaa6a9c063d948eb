//! Closed-form bounds and their empirical checks.
//!
//! * [`bounds`]: the D-UCB and SW-UCB bad-play bounds and their building
//!   blocks.
//! * [`concentration`]: self-normalized deviation and maximal inequalities
//!   for discounted sums with a previsible selection sequence, plus Monte
//!   Carlo estimators of the matching tail probabilities.
//! * [`counting`]: the deterministic counting lemma and its discounted
//!   corollary, checked by direct scan.

pub mod bounds;
pub mod concentration;
pub mod counting;

/// `n_t(gamma) = sum_{s=1}^t gamma^(t-s)`.
pub fn discounted_horizon(gamma: f64, t: u64) -> f64 {
    if gamma == 1.0 {
        t as f64
    } else {
        (1.0 - gamma.powf(t as f64)) / (1.0 - gamma)
    }
}

/// Ceiling that forgives floating-point noise: values within a relative
/// 1e-9 of an integer round to it. `T * (1 - 0.999)` is 10, not 11.
pub fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}
