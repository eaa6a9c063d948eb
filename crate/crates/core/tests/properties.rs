use std::sync::Arc;

use nsbandit::episode::{run_episode, EpisodeStreams};
use nsbandit::lowerbound::kl_bernoulli;
use nsbandit::policy::{select_arm, Ducb, SwUcb, Ucb1};
use nsbandit::theory::bounds::{ducb_a, DucbBoundParams};
use nsbandit::theory::concentration::{deviation_bound, sharper_deviation_bound};
use nsbandit::theory::counting::counting_lemma_check;
use nsbandit::{
    ArmId, EnvironmentSpec, EpisodeConfig, PiecewiseConstantBernoulli, Policy, Segment,
};
use proptest::prelude::*;

fn plays(arms: usize, len: usize) -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0..arms, 0.0f64..=1.0), 1..len)
}

fn env_strategy(horizon: u64) -> impl Strategy<Value = EnvironmentSpec> {
    (2usize..=4)
        .prop_flat_map(move |k| {
            prop::collection::vec(prop::collection::vec((1..=horizon, 0.0f64..=1.0), 1..4), k)
        })
        .prop_map(move |raw| {
            let arms = raw
                .into_iter()
                .map(|mut segs| {
                    segs.sort_by_key(|s| s.0);
                    segs.dedup_by_key(|s| s.0);
                    segs[0].0 = 1;
                    segs.into_iter()
                        .map(|(start, p)| Segment { start, p })
                        .collect()
                })
                .collect();
            PiecewiseConstantBernoulli::new(horizon, arms)
                .unwrap()
                .into()
        })
}

fn decisions(env: &EnvironmentSpec, policy: &mut dyn Policy, seed: u64) -> Vec<ArmId> {
    let config = EpisodeConfig::new(env.arms(), env.horizon(), 1.0, seed, 1).unwrap();
    run_episode(&config, env, policy, 0, EpisodeStreams::derive(seed, 0))
        .unwrap()
        .plays()
        .collect()
}

proptest! {
    #[test]
    fn argmax_invariant_under_power_of_two_scaling(
        v in prop::collection::vec(-1e6f64..1e6, 1..10),
        e in -20i32..20,
    ) {
        let scaled: Vec<f64> = v.iter().map(|x| x * 2f64.powi(e)).collect();
        prop_assert_eq!(select_arm(&v).unwrap(), select_arm(&scaled).unwrap());
    }

    #[test]
    fn ducb_matches_direct_resummation(seq in plays(3, 400), gamma in 0.5f64..1.0) {
        let mut p = Ducb::new(3, 0.6, gamma, 1.0).unwrap();
        for &(a, r) in &seq {
            p.update(ArmId::new(a + 1, 3).unwrap(), r).unwrap();
        }
        let t = seq.len();
        for arm in 0..3 {
            let mut n = 0.0;
            let mut s = 0.0;
            for (idx, &(a, r)) in seq.iter().enumerate() {
                if a == arm {
                    let w = gamma.powi((t - 1 - idx) as i32);
                    n += w;
                    s += w * r;
                }
            }
            let id = ArmId::new(arm + 1, 3).unwrap();
            prop_assert!((p.discounted_count(id) - n).abs() <= 1e-9 * n.max(1e-300) || n < 1e-300);
            prop_assert!((p.discounted_sum(id) - s).abs() <= 1e-9 * s.max(1.0));
        }
        let total: f64 = (0..3).map(|a| p.discounted_count(ArmId::new(a + 1, 3).unwrap())).sum();
        prop_assert!((total - p.discounted_total()).abs() <= 1e-9 * total);
        prop_assert!(p.discounted_total() <= 1.0 / (1.0 - gamma) + 1e-9);
    }

    #[test]
    fn swucb_matches_suffix(seq in plays(3, 300), window in 1u64..50) {
        let mut p = SwUcb::new(3, 0.6, window, 1.0).unwrap();
        for &(a, r) in &seq {
            p.update(ArmId::new(a + 1, 3).unwrap(), r).unwrap();
        }
        let start = seq.len().saturating_sub(window as usize);
        for arm in 0..3 {
            let suffix = &seq[start..];
            let n = suffix.iter().filter(|x| x.0 == arm).count() as u64;
            let id = ArmId::new(arm + 1, 3).unwrap();
            prop_assert_eq!(p.windowed_count(id), n);
            let s: f64 = suffix.iter().filter(|x| x.0 == arm).map(|x| x.1).sum();
            prop_assert!((p.windowed_sum(id) - s).abs() <= 1e-9);
        }
    }

    #[test]
    fn reductions_to_ucb1(env in env_strategy(300), xi in 0.1f64..2.0, seed in 0u64..1000) {
        let k = env.arms();
        let reference = decisions(&env, &mut Ucb1::new(k, xi, 1.0).unwrap(), seed);
        let sw = decisions(&env, &mut SwUcb::new(k, xi, 300, 1.0).unwrap(), seed);
        let d = decisions(&env, &mut Ducb::new(k, xi / 4.0, 1.0, 1.0).unwrap(), seed);
        prop_assert_eq!(&reference, &sw);
        prop_assert_eq!(&reference, &d);
    }

    #[test]
    fn kl_nonnegative(p in 0.0f64..=1.0, q in 0.001f64..0.999) {
        prop_assert!(kl_bernoulli(p, q).unwrap() >= 0.0);
    }

    #[test]
    fn deviation_bounds_ordered_and_monotone(
        delta in 0.0f64..3.0,
        eta in 0.01f64..2.0,
        n in 1.0f64..1e6,
        extra in 0.0f64..1.0,
    ) {
        let loose = deviation_bound(delta, eta, 1.0, n).unwrap();
        prop_assert!(sharper_deviation_bound(delta, eta, 1.0, n).unwrap() <= loose * (1.0 + 1e-12));
        prop_assert!(deviation_bound(delta + extra, eta, 1.0, n).unwrap() <= loose);
        prop_assert!(deviation_bound(delta, eta, 1.0, n * (1.0 + extra)).unwrap() >= loose);
    }

    #[test]
    fn ducb_a_monotone_in_horizon(gamma in 0.9f64..0.9999, t in 10u64..100_000, gap in 0.05f64..1.0) {
        let p = DucbBoundParams { gamma, xi: 0.6, reward_bound: 1.0, horizon: t, breakpoints: 1, gap, arms: 3 };
        let q = DucbBoundParams { horizon: 2 * t, ..p };
        prop_assert!(ducb_a(&q).unwrap() >= ducb_a(&p).unwrap());
        let half = DucbBoundParams { gap: gap / 2.0, ..p };
        let ratio = ducb_a(&half).unwrap() / ducb_a(&p).unwrap();
        prop_assert!(ratio.is_nan() || (ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn counting_lemma_on_random_sequences(
        seq in prop::collection::vec(1usize..=3, 1..200),
        window in 1usize..20,
        m in 0.5f64..6.0,
        arm in 1usize..=3,
    ) {
        let c = counting_lemma_check(&seq, 3, window, m, arm).unwrap();
        prop_assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
    }
}

#[test]
fn oracle_reduction_suite_is_deterministic() {
    let env = Arc::new(nsbandit::scenarios::abrupt_three_arms(2_000));
    let a = decisions(&env, &mut Ucb1::new(3, 0.5, 1.0).unwrap(), 9);
    let b = decisions(&env, &mut Ucb1::new(3, 0.5, 1.0).unwrap(), 9);
    assert_eq!(a, b);
}
