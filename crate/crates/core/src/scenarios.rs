//! The two reference scenarios.

use crate::env::{EnvironmentSpec, PeriodicBernoulli, PiecewiseConstantBernoulli, Segment};

/// Three arms with means 0.5 and 0.3, and a third arm at 0.4 that jumps to
/// 0.9 on rounds `[3000, 5000)`.
pub fn abrupt_three_arms(horizon: u64) -> EnvironmentSpec {
    PiecewiseConstantBernoulli::new(
        horizon,
        vec![
            vec![Segment { start: 1, p: 0.5 }],
            vec![Segment { start: 1, p: 0.3 }],
            vec![
                Segment { start: 1, p: 0.4 },
                Segment {
                    start: 3000,
                    p: 0.9,
                },
                Segment {
                    start: 5000,
                    p: 0.4,
                },
            ],
        ],
    )
    .expect("static schedule is valid")
    .into()
}

/// Two arms; arm 1 oscillates around the fixed 0.5 of arm 2.
pub fn periodic_two_arms(horizon: u64, cycles: f64) -> EnvironmentSpec {
    PeriodicBernoulli::new(horizon, cycles)
        .expect("0.5 +- 0.4 stays in [0,1]")
        .into()
}
