//! Parameter choices for D-UCB, SW-UCB and EXP3.S.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Result, RunnerError};

fn bad(msg: String) -> RunnerError {
    RunnerError::Config(msg)
}

fn check_bound(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("reward bound must be positive, got {b}")))
    }
}

fn check_gamma(gamma: f64) -> Result<f64> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(bad(format!("tuned gamma {gamma} falls outside (0,1)")))
    }
}

fn round_window(raw: f64) -> u64 {
    if raw.is_finite() {
        (raw.round() as u64).max(2)
    } else {
        u64::MAX
    }
}

/// `1 - sqrt(Upsilon_T / T) / (4B)`.
pub fn tune_gamma(horizon: u64, breakpoints: f64, b: f64) -> Result<f64> {
    check_bound(b)?;
    if horizon == 0 || !(breakpoints >= 1.0) {
        return Err(bad("need T >= 1 and Upsilon_T >= 1".into()));
    }
    check_gamma(1.0 - (breakpoints / horizon as f64).sqrt() / (4.0 * b))
}

/// `1 - sqrt(r) / (4B)` for a breakpoint density `r`.
pub fn tune_gamma_density(r: f64, b: f64) -> Result<f64> {
    check_bound(b)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(bad(format!("density must lie in (0,1], got {r}")));
    }
    check_gamma(1.0 - r.sqrt() / (4.0 * b))
}

/// `2B sqrt(T ln T / Upsilon_T)`, rounded, at least 2.
pub fn tune_tau(horizon: u64, breakpoints: f64, b: f64) -> Result<u64> {
    check_bound(b)?;
    if horizon == 0 || !(breakpoints >= 1.0) {
        return Err(bad("need T >= 1 and Upsilon_T >= 1".into()));
    }
    let t = horizon as f64;
    Ok(round_window(2.0 * b * (t * t.ln() / breakpoints).sqrt()))
}

/// `2B sqrt(-ln r / r)`, rounded, at least 2.
pub fn tune_tau_density(r: f64, b: f64) -> Result<u64> {
    check_bound(b)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(bad(format!("density must lie in (0,1), got {r}")));
    }
    Ok(round_window(2.0 * b * (-r.ln() / r).sqrt()))
}

/// `1 - (2^k)^((beta-1)/2) / (4B)` with `2^k <= t < 2^(k+1)`.
pub fn doubling_gamma(t: u64, beta: f64, b: f64) -> Result<f64> {
    check_bound(b)?;
    if t == 0 || !(0.0..1.0).contains(&beta) {
        return Err(bad(format!(
            "need t >= 1 and beta in [0,1), got t={t}, beta={beta}"
        )));
    }
    let k = 63 - t.leading_zeros();
    let block = 2f64.powi(k as i32);
    check_gamma(1.0 - block.powf((beta - 1.0) / 2.0) / (4.0 * b))
}

/// Discount used in the reference experiments: `1 - 1/(4 sqrt T)`.
pub fn reference_gamma(horizon: u64) -> Result<f64> {
    check_gamma(1.0 - 1.0 / (4.0 * (horizon as f64).sqrt()))
}

/// Window used in the reference experiments: `4 sqrt(T ln T)`, rounded.
pub fn reference_tau(horizon: u64) -> u64 {
    let t = horizon as f64;
    round_window(4.0 * (t * t.ln()).sqrt())
}

/// EXP3.S parameters `(gamma, alpha)`:
/// `gamma = sqrt(K (Upsilon_T ln(KT) + e) / ((e-1) T))` capped at 1, `alpha = 1/T`.
pub fn exp3s_params(arms: usize, horizon: u64, breakpoints: f64) -> Result<(f64, f64)> {
    if arms == 0 || horizon == 0 || breakpoints < 0.0 {
        return Err(bad("need K >= 1, T >= 1, Upsilon_T >= 0".into()));
    }
    let k = arms as f64;
    let t = horizon as f64;
    let gamma = (k * (breakpoints * (k * t).ln() + E) / ((E - 1.0) * t))
        .sqrt()
        .min(1.0);
    Ok((gamma, 1.0 / t))
}

/// What is known about the non-stationarity ahead of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TuningInput {
    /// Number of breakpoints up to `T`.
    Breakpoints {
        horizon: u64,
        breakpoints: f64,
        reward_bound: f64,
    },
    /// `Upsilon_T = O(T^beta)`.
    Growth {
        horizon: u64,
        beta: f64,
        reward_bound: f64,
    },
    /// Breakpoints occur at rate `r` per round.
    Density { rate: f64, reward_bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tuned {
    pub gamma: f64,
    pub tau: u64,
}

pub fn tune(input: TuningInput) -> Result<Tuned> {
    match input {
        TuningInput::Breakpoints {
            horizon,
            breakpoints,
            reward_bound,
        } => Ok(Tuned {
            gamma: tune_gamma(horizon, breakpoints, reward_bound)?,
            tau: tune_tau(horizon, breakpoints, reward_bound)?,
        }),
        TuningInput::Growth {
            horizon,
            beta,
            reward_bound,
        } => {
            if !(0.0..1.0).contains(&beta) {
                return Err(bad(format!("beta must lie in [0,1), got {beta}")));
            }
            // Upsilon_T replaced by T^beta
            let upsilon = (horizon as f64).powf(beta);
            Ok(Tuned {
                gamma: tune_gamma(horizon, upsilon, reward_bound)?,
                tau: tune_tau(horizon, upsilon, reward_bound)?,
            })
        }
        TuningInput::Density { rate, reward_bound } => Ok(Tuned {
            gamma: tune_gamma_density(rate, reward_bound)?,
            tau: tune_tau_density(rate, reward_bound)?,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_values() {
        assert_relative_eq!(
            tune_gamma(10_000, 2.0, 1.0).unwrap(),
            0.996_464_466_094_067_2,
            max_relative = 1e-14
        );
        assert_eq!(reference_gamma(10_000).unwrap(), 0.9975);
        assert_relative_eq!(
            tune_gamma_density(0.01, 1.0).unwrap(),
            0.975,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            tune_gamma_density(1.0, 1.0).unwrap(),
            0.75,
            max_relative = 1e-15
        );
        assert!(tune_gamma(10_000, 0.5, 1.0).is_err());
        assert!(tune_gamma(1, 100.0, 1.0).is_err());
    }

    #[test]
    fn gamma_approaches_one() {
        let mut prev = 0.0;
        for t in [10u64, 100, 10_000, 1_000_000, 100_000_000] {
            let g = tune_gamma(t, 2.0, 1.0).unwrap();
            assert!(g > prev);
            prev = g;
        }
        assert!(1.0 - prev < 1e-4);
    }

    #[test]
    fn tau_values() {
        assert_eq!(tune_tau(10_000, 2.0, 1.0).unwrap(), 429);
        assert_eq!(reference_tau(10_000), 1214);
        assert_eq!(tune_tau_density(0.01, 1.0).unwrap(), 43);
        assert_eq!(tune_tau_density(0.0001, 1.0).unwrap(), 607);
        assert_eq!(tune_tau_density(0.999_999, 1.0).unwrap(), 2);
        assert_eq!(tune_tau(10, 1e6, 1.0).unwrap(), 2);
        let mut prev = 0;
        for t in [10u64, 100, 10_000, 1_000_000] {
            let tau = tune_tau(t, 2.0, 1.0).unwrap();
            assert!(tau >= prev);
            prev = tau;
        }
    }

    #[test]
    fn doubling_blocks() {
        assert_relative_eq!(
            doubling_gamma(1, 0.0, 1.0).unwrap(),
            0.75,
            max_relative = 1e-15
        );
        let g8 = doubling_gamma(8, 0.0, 1.0).unwrap();
        assert_relative_eq!(g8, 0.911_611_652_351_681_5, max_relative = 1e-14);
        for t in 9..16 {
            assert_eq!(doubling_gamma(t, 0.0, 1.0).unwrap(), g8);
        }
        assert_relative_eq!(
            doubling_gamma(1 << 20, 1.0 - 1e-12, 1.0).unwrap(),
            0.75,
            max_relative = 1e-9
        );
        assert!(doubling_gamma(8, 1.0, 1.0).is_err());
    }

    #[test]
    fn exp3s_reference_values() {
        let (g, a) = exp3s_params(3, 10_000, 2.0).unwrap();
        assert_relative_eq!(g, 0.063_830_519_381_318_88, max_relative = 1e-12);
        assert_eq!(a, 1e-4);
        assert_eq!(exp3s_params(3, 1, 5.0).unwrap().0, 1.0);
    }

    #[test]
    fn tuning_modes() {
        let a = tune(TuningInput::Breakpoints {
            horizon: 10_000,
            breakpoints: 2.0,
            reward_bound: 1.0,
        })
        .unwrap();
        assert_eq!(a.tau, 429);
        let b = tune(TuningInput::Growth {
            horizon: 10_000,
            beta: 0.0,
            reward_bound: 1.0,
        })
        .unwrap();
        assert_eq!(b.gamma, tune_gamma(10_000, 1.0, 1.0).unwrap());
        let c = tune(TuningInput::Density {
            rate: 0.01,
            reward_bound: 1.0,
        })
        .unwrap();
        assert_eq!(c.tau, 43);
    }
}
