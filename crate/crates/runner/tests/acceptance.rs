//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::sync::Arc;
use std::time::Instant;

use nsbandit::accounting::mean_and_stderr;
use nsbandit::episode::{run_episode, run_replications, EpisodeStreams};
use nsbandit::lowerbound::{mixture_regret, modified_env, LowerBoundConfig, PeriodChoice};
use nsbandit::policy::{Ducb, Oracle, SwUcb, Ucb1};
use nsbandit::rng::derive_stream;
use nsbandit::scenarios::{abrupt_three_arms, periodic_two_arms};
use nsbandit::theory::bounds::{
    ducb_b_limit, ducb_regret_bound, swucb_c_limit, swucb_regret_bound, DucbBoundParams,
    EmpiricalComparison, SwucbBoundParams,
};
use nsbandit::theory::counting::{exhaustive_lemma_check, randomized_corollary_check};
use nsbandit::{
    ArmId, EnvironmentSpec, EpisodeConfig, PiecewiseConstantBernoulli, Policy, PolicySpec, Segment,
};
use nsbandit_runner::presets::preset;
use nsbandit_runner::run::{
    run_concentration, write_per_round, write_summary, ConcentrationGrid, ExperimentResult,
};
use nsbandit_runner::run_experiment;
use nsbandit_runner::tuning::{tune_gamma, tune_tau};
use rand::Rng;

const T: u64 = 10_000;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_env(seed: u64, index: u64, horizon: u64) -> EnvironmentSpec {
    let mut rng = derive_stream(seed, index, "acceptance-env");
    let k = rng.gen_range(2..=5);
    let arms = (0..k)
        .map(|_| {
            let mut starts: Vec<u64> = (0..rng.gen_range(0..4))
                .map(|_| rng.gen_range(2..=horizon))
                .collect();
            starts.push(1);
            starts.sort_unstable();
            starts.dedup();
            starts
                .into_iter()
                .map(|start| Segment {
                    start,
                    p: rng.gen::<f64>(),
                })
                .collect()
        })
        .collect();
    PiecewiseConstantBernoulli::new(horizon, arms)
        .unwrap()
        .into()
}

fn decisions(env: &EnvironmentSpec, policy: &mut dyn Policy, seed: u64) -> Vec<ArmId> {
    let config = EpisodeConfig::new(env.arms(), env.horizon(), 1.0, seed, 1).unwrap();
    run_episode(&config, env, policy, 0, EpisodeStreams::derive(seed, 0))
        .unwrap()
        .plays()
        .collect()
}

fn c1_oracle() -> Outcome {
    let mut envs = vec![
        ("abrupt", abrupt_three_arms(T)),
        ("periodic", periodic_two_arms(T, 1.0)),
        ("periodic R=3", periodic_two_arms(T, 3.0)),
    ];
    let lb = LowerBoundConfig {
        base_means: vec![0.5, 0.3],
        nu: 0.7,
        period: PeriodChoice::Count { count: 10 },
        horizon: T,
        replications: 1,
        seed: 0,
    };
    envs.push(("shifted j=4", modified_env(&lb, 1_000, 4).unwrap()));
    let mut worst = 0.0f64;
    for (_, env) in &envs {
        let env = Arc::new(env.clone());
        let config = EpisodeConfig::new(env.arms(), T, 1.0, 7, 1).unwrap();
        let trace = run_episode(
            &config,
            &env,
            &mut Oracle::new(Arc::clone(&env)),
            0,
            EpisodeStreams::derive(7, 0),
        )
        .unwrap();
        let series = nsbandit::accounting::regret_series(&trace, &env).unwrap();
        worst = series.0.iter().fold(worst, |m, &r| m.max(r.abs()));
    }
    outcome(
        worst == 0.0,
        format!("{} environments, max |r_t| = {worst}", envs.len()),
    )
}

fn c2_reductions() -> Outcome {
    let xi = 0.5;
    let mut sw_mismatch = 0;
    let mut d_mismatch = 0;
    for i in 0..50 {
        let env = random_env(2024, i, 2_000);
        let k = env.arms();
        let reference = decisions(&env, &mut Ucb1::new(k, xi, 1.0).unwrap(), i);
        if decisions(&env, &mut SwUcb::new(k, xi, 2_000, 1.0).unwrap(), i) != reference {
            sw_mismatch += 1;
        }
        if decisions(&env, &mut Ducb::new(k, xi / 4.0, 1.0, 1.0).unwrap(), i) != reference {
            d_mismatch += 1;
        }
    }
    outcome(
        sw_mismatch == 0 && d_mismatch == 0,
        format!("50 environments, T=2000: SW-UCB(tau=T) mismatches {sw_mismatch}, D-UCB(gamma=1, xi/4) mismatches {d_mismatch}"),
    )
}

fn drive(
    env: &EnvironmentSpec,
    policy: &mut dyn Policy,
    seed: u64,
    mut visit: impl FnMut(u64, &[(usize, f64)], &dyn Policy),
) {
    let mut streams = EpisodeStreams::derive(seed, 0);
    let k = env.arms() as u64;
    let mut history = Vec::new();
    for t in 1..=env.horizon() {
        let arm = if t <= k {
            ArmId::new(t as usize, k as usize).unwrap()
        } else {
            policy.select(t, &mut streams.policy).unwrap()
        };
        let reward = env.sample_reward(t, arm, &mut streams.rewards).unwrap();
        policy.observe(arm, reward).unwrap();
        history.push((arm.zero_based(), reward));
        visit(t, &history, &*policy);
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn c3_incremental() -> Outcome {
    let env = random_env(77, 0, 5_000);
    let k = env.arms();
    let mut rng = derive_stream(77, 1, "checkpoints");
    let mut checkpoints: Vec<u64> = (0..100).map(|_| rng.gen_range(1..=5_000)).collect();
    checkpoints.sort_unstable();
    let gamma = 0.99;
    let mut worst = 0.0f64;
    let mut d = Ducb::new(k, 0.5, gamma, 1.0).unwrap();
    let mut probe = d.clone();
    drive(&env, &mut d, 5, |t, history, _| {
        probe
            .update(
                ArmId::new(history[t as usize - 1].0 + 1, k).unwrap(),
                history[t as usize - 1].1,
            )
            .unwrap();
        if checkpoints.binary_search(&t).is_ok() {
            for arm in 0..k {
                let (mut n, mut s) = (0.0, 0.0);
                for (idx, &(a, r)) in history.iter().enumerate() {
                    if a == arm {
                        let w = gamma.powi((t as usize - 1 - idx) as i32);
                        n += w;
                        s += w * r;
                    }
                }
                let id = ArmId::new(arm + 1, k).unwrap();
                worst = worst.max(rel_err(probe.discounted_count(id), n));
                worst = worst.max(rel_err(probe.discounted_sum(id), s));
            }
        }
    });
    let window = 300u64;
    let mut sw = SwUcb::new(k, 0.5, window, 1.0).unwrap();
    let mut sw_probe = sw.clone();
    let mut sw_mismatch = 0;
    drive(&env, &mut sw, 6, |t, history, _| {
        let (a, r) = history[t as usize - 1];
        sw_probe.update(ArmId::new(a + 1, k).unwrap(), r).unwrap();
        if checkpoints.binary_search(&t).is_ok() {
            let start = history.len().saturating_sub(window as usize);
            for arm in 0..k {
                let n = history[start..].iter().filter(|x| x.0 == arm).count() as u64;
                if sw_probe.windowed_count(ArmId::new(arm + 1, k).unwrap()) != n {
                    sw_mismatch += 1;
                }
            }
        }
    });
    outcome(
        worst <= 1e-9 && sw_mismatch == 0,
        format!("100 checkpoints: D-UCB max relative error {worst:.2e}, SW-UCB count mismatches {sw_mismatch}"),
    )
}

fn concentration(fixed: bool, replications: u64) -> Outcome {
    let mut grid = ConcentrationGrid::standard(replications, 1);
    grid.fixed = fixed;
    grid.sup = !fixed;
    let rows = run_concentration(&grid).unwrap();
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.consistent)
        .map(|r| format!("{}/{}/{}", r.rule.name(), r.gamma, r.delta))
        .collect();
    let max_emp = rows.iter().map(|r| r.empirical).fold(0.0, f64::max);
    let min_margin = rows
        .iter()
        .map(|r| r.bound + 3.0 * r.stderr - r.empirical)
        .fold(f64::INFINITY, f64::min);
    outcome(
        failures.is_empty(),
        format!(
            "{} grid points, {replications} replications, eta=0.3: max empirical {max_emp:.4}, min slack {min_margin:.4}{}",
            rows.len(),
            if failures.is_empty() { String::new() } else { format!(", violations {failures:?}") }
        ),
    )
}

fn c6_counting() -> Outcome {
    let mut lemma_violations = 0;
    let mut max_ratio = 0.0f64;
    for tau in [2usize, 3, 4] {
        for m in [1.0, 2.0, 3.0] {
            let s = exhaustive_lemma_check(2, 12, tau, m).unwrap();
            lemma_violations += s.violations;
            max_ratio = max_ratio.max(s.max_lhs as f64 / ((12.0 / tau as f64).ceil() * m));
        }
    }
    let mut corollary_violations = 0;
    for tau in [2usize, 3, 5] {
        for a in [0.5, 1.5, 2.5, 4.0] {
            corollary_violations += randomized_corollary_check(2, 10, 0.9, tau, a, 10_000, 3)
                .unwrap()
                .violations;
        }
    }
    outcome(
        lemma_violations == 0 && corollary_violations == 0,
        format!(
            "lemma: 2^12 sequences x 9 (tau, m), {lemma_violations} violations, max lhs/rhs {max_ratio:.3}; \
             corollary: 12 x 10^4 random sequences, {corollary_violations} violations"
        ),
    )
}

fn final_stats(result: &ExperimentResult, label: &str) -> (f64, f64) {
    let a = result.policy(label).unwrap();
    (a.final_mean_regret(), a.final_stderr())
}

fn c7_abrupt_ordering() -> Outcome {
    let result = run_experiment(&preset("abrupt", T, 200, 1).unwrap()).unwrap();
    let (ucb, ucb_se) = final_stats(&result, "UCB-1");
    let (d, d_se) = final_stats(&result, "D-UCB");
    let (sw, sw_se) = final_stats(&result, "SW-UCB");
    let (exp, _) = final_stats(&result, "EXP3.S");
    let sep_sw = (ucb - sw) / (ucb_se * ucb_se + sw_se * sw_se).sqrt();
    let sep_d = (ucb - d) / (ucb_se * ucb_se + d_se * d_se).sqrt();
    let rel = (d - sw).abs() / d.min(sw);
    // diagnostic only: D-UCB with its padding halved (xi / 4)
    let mut halved = preset("abrupt", T, 200, 1).unwrap();
    halved.policies = vec![PolicySpec::Ducb {
        xi: 0.125,
        gamma: nsbandit_runner::tuning::reference_gamma(T).unwrap(),
        label: None,
    }];
    let (dh, _) = final_stats(&run_experiment(&halved).unwrap(), "D-UCB");
    outcome(
        sep_sw >= 5.0 && sep_d >= 5.0 && rel <= 0.30,
        format!(
            "200 reps: UCB-1 {ucb:.1}, EXP3.S {exp:.1}, D-UCB {d:.1}, SW-UCB {sw:.1}; \
             separations {sep_d:.1} / {sep_sw:.1} SE; D vs SW {:.1}% \
             (diagnostic: D-UCB with halved padding {dh:.1}, {:.1}% from SW-UCB)",
            100.0 * rel,
            100.0 * (dh - sw).abs() / dh.min(sw)
        ),
    )
}

fn c8_periodic() -> Outcome {
    let mut config = preset("periodic", T, 100, 1).unwrap();
    config.policies.push(PolicySpec::Oracle { label: None });
    let result = run_experiment(&config).unwrap();
    let oracle = &result.policy("Oracle").unwrap().mean_frequency;
    let mad = |label: &str| {
        let f = &result.policy(label).unwrap().mean_frequency;
        let lo = (T / 2) as usize - 1;
        let hi = T as usize;
        (lo..hi).map(|t| (f[t] - oracle[t]).abs()).sum::<f64>() / (hi - lo) as f64
    };
    let (u, d, s, e) = (mad("UCB-1"), mad("D-UCB"), mad("SW-UCB"), mad("EXP3.S"));
    outcome(
        d <= 0.15 && s <= 0.15 && u > d && u > s,
        format!("MAD of arm-1 frequency vs oracle over [T/2, T]: D-UCB {d:.4}, SW-UCB {s:.4}, UCB-1 {u:.4}, EXP3.S {e:.4}"),
    )
}

fn within(value: f64, limit: f64) -> bool {
    (value - limit).abs() <= 0.05 * limit.abs()
}

fn c9_limits() -> Outcome {
    let (xi, gap) = (0.6, 0.2);
    let b_lim = ducb_b_limit(xi, 1.0, gap).unwrap();
    let c_lim = swucb_c_limit(xi, 1.0, gap).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for gamma in [0.999, 0.9999] {
        let r = ducb_regret_bound(&DucbBoundParams {
            gamma,
            xi,
            reward_bound: 1.0,
            horizon: T,
            breakpoints: 2,
            gap,
            arms: 3,
        })
        .unwrap();
        let (ok_c, ok_b) = (within(r.c, 1.0), within(r.b, b_lim));
        pass &= ok_c && ok_b;
        parts.push(format!(
            "gamma={gamma}: C={:.4}{} B={:.2}/{b_lim:.2}{}",
            r.c,
            if ok_c { "" } else { " (off)" },
            r.b,
            if ok_b { "" } else { " (off)" }
        ));
    }
    let far = ducb_regret_bound(&DucbBoundParams {
        gamma: 1.0 - 1e-6,
        xi,
        reward_bound: 1.0,
        horizon: T,
        breakpoints: 2,
        gap,
        arms: 3,
    })
    .unwrap();
    parts.push(format!("(diagnostic gamma=1-1e-6: C={:.4})", far.c));
    let r = swucb_regret_bound(&SwucbBoundParams {
        window: 1_000_000,
        xi,
        reward_bound: 1.0,
        horizon: 10_000_000,
        breakpoints: 2,
        gap,
    })
    .unwrap();
    let ok = within(r.c, c_lim);
    pass &= ok;
    parts.push(format!(
        "tau=1e6: C={:.3}/{c_lim:.3}{}",
        r.c,
        if ok { "" } else { " (off)" }
    ));
    outcome(pass, format!("xi=0.6, K=3, gap=0.2: {}", parts.join("; ")))
}

fn c10_lower_bound() -> Outcome {
    let config = LowerBoundConfig {
        base_means: vec![0.5, 0.3],
        nu: 0.7,
        period: PeriodChoice::Count { count: 10 },
        horizon: T,
        replications: 50,
        seed: 1,
    };
    let r = mixture_regret(
        &PolicySpec::Ucb1 {
            xi: 0.5,
            label: None,
        },
        &config,
    )
    .unwrap();
    let (value, se) = r.corollary_max();
    outcome(
        r.corollary_holds(3.0) == Some(true),
        format!(
            "UCB-1, M=10, 50 reps: E[R_T]={:.2} E*[R_T]={:.2}, max {value:.2} (SE {se:.2}) vs sqrt(C(mu)T)={:.2}",
            r.base_regret, r.mixture_regret, r.corollary_bound
        ),
    )
}

fn c11_upper_bounds() -> Outcome {
    let env = Arc::new(abrupt_three_arms(T));
    let xi = 0.6;
    let gamma = tune_gamma(T, 2.0, 1.0).unwrap();
    let tau = tune_tau(T, 2.0, 1.0).unwrap();
    let reps = 100;
    let config = EpisodeConfig::new(3, T, 1.0, 11, reps).unwrap();
    let upsilon = env.breakpoint_count(T) as u64;
    let mut judged = 0;
    let mut failed = 0;
    let mut parts = Vec::new();
    let policies = [
        PolicySpec::Ducb {
            xi,
            gamma,
            label: None,
        },
        PolicySpec::Swucb {
            xi,
            tau,
            label: None,
        },
    ];
    for spec in &policies {
        let env_ref = Arc::clone(&env);
        let bad = run_replications(&config, &env, spec, "", move |trace| {
            nsbandit::accounting::bad_play_count(&trace, &env_ref)
        })
        .unwrap();
        for arm in 1..=3 {
            let id = ArmId::new(arm, 3).unwrap();
            let counts: Vec<f64> = bad.iter().map(|b| b.get(id) as f64).collect();
            let (mean, se) = mean_and_stderr(&counts);
            let gap = env.delta_mu(T, id).unwrap();
            let bound = match spec {
                PolicySpec::Ducb { .. } => {
                    ducb_regret_bound(&DucbBoundParams {
                        gamma,
                        xi,
                        reward_bound: 1.0,
                        horizon: T,
                        breakpoints: upsilon,
                        gap,
                        arms: 3,
                    })
                    .unwrap()
                    .rhs
                }
                _ => {
                    swucb_regret_bound(&SwucbBoundParams {
                        window: tau,
                        xi,
                        reward_bound: 1.0,
                        horizon: T,
                        breakpoints: upsilon,
                        gap,
                    })
                    .unwrap()
                    .rhs
                }
            };
            let cmp = EmpiricalComparison::new(mean, se, counts.len(), bound, T);
            match cmp.holds {
                Some(true) => judged += 1,
                Some(false) => {
                    judged += 1;
                    failed += 1
                }
                None => {}
            }
            parts.push(format!(
                "{} arm {arm}: {mean:.0} vs {bound:.0}{}",
                spec.label(),
                if cmp.vacuous { " (vacuous)" } else { "" }
            ));
        }
    }
    outcome(
        failed == 0,
        format!(
            "gamma={gamma:.6}, tau={tau}, xi=0.6, {reps} reps; {judged} non-vacuous, {failed} violated; {}",
            parts.join("; ")
        ),
    )
}

fn csv_bodies(result: &ExperimentResult) -> (Vec<u8>, Vec<u8>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_per_round(result, &mut a).unwrap();
    write_summary(result, &mut b).unwrap();
    (a, b)
}

fn c12_determinism() -> Outcome {
    let mut identical = true;
    for name in ["abrupt", "periodic"] {
        let config = preset(name, T, 20, 99).unwrap();
        let first = csv_bodies(&run_experiment(&config).unwrap());
        let second = csv_bodies(&run_experiment(&config).unwrap());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = csv_bodies(&pool.install(|| run_experiment(&config)).unwrap());
        identical &= first == second && first == serial;
    }
    outcome(
        identical,
        "both presets, T=1e4, 20 reps: repeated and single-threaded runs byte-identical",
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "oracle zero regret", c1_oracle),
        (2, "policy reductions", c2_reductions),
        (3, "incremental statistics", c3_incremental),
        (4, "fixed-time concentration", || {
            concentration(true, 100_000)
        }),
        (5, "maximal inequality", || concentration(false, 100_000)),
        (6, "counting lemma and corollary", c6_counting),
        (7, "abrupt scenario ordering", c7_abrupt_ordering),
        (8, "periodic scenario tracking", c8_periodic),
        (9, "bound limits", c9_limits),
        (10, "lower-bound corollary", c10_lower_bound),
        (11, "upper bounds vs bad plays", c11_upper_bounds),
        (12, "determinism", c12_determinism),
    ];
    let filter: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if filter.as_ref().is_some_and(|f| !f.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        println!(
            "[{}] criterion {id:>2} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
