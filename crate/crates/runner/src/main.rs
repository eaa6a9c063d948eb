use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nsbandit::lowerbound::{mixture_regret, mixture_scan, LowerBoundConfig, PeriodChoice};
use nsbandit::theory::bounds::{
    ducb_regret_bound, swucb_regret_bound, DucbBoundParams, SwucbBoundParams,
};
use nsbandit::PolicySpec;
use nsbandit_runner::presets::{preset, PRESET_HORIZON};
use nsbandit_runner::run::{
    fmt_float, run_concentration, write_concentration, write_lowerbound_episodes,
    write_lowerbound_summary, ConcentrationGrid,
};
use nsbandit_runner::tuning::{exp3s_params, reference_gamma, reference_tau, tune, TuningInput};
use nsbandit_runner::{run_experiment, write_outputs, ExperimentConfig};

const OUT_DIR_VAR: &str = "NSBANDIT_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "nsbandit",
    version,
    about = "Non-stationary bandit simulations and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config or a preset and write CSVs.
    Simulate(SimulateArgs),
    /// Evaluate the D-UCB and SW-UCB bad-play bounds.
    Bounds(BoundsArgs),
    /// Monte Carlo check of the deviation and maximal inequalities.
    Concentration(ConcentrationArgs),
    /// Mixture regret on period-shifted environments.
    Lowerbound(LowerboundArgs),
    /// Print tuned discount factors and window sizes.
    Tune(TuneArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON experiment config.
    config: Option<PathBuf>,
    /// Use a built-in experiment instead of a config file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Output directory; defaults to the config value, then $NSBANDIT_OUT_DIR, then ./out.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    /// Horizon for presets.
    #[arg(long)]
    horizon: Option<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    tau: Option<u64>,
    #[arg(long, default_value_t = 0.6)]
    xi: f64,
    #[arg(long)]
    gap: f64,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 2)]
    breakpoints: u64,
    #[arg(long, default_value_t = 3)]
    arms: usize,
    #[arg(long, default_value_t = 1.0)]
    reward_bound: f64,
}

#[derive(Args)]
struct ConcentrationArgs {
    #[arg(long, default_value_t = 100_000)]
    replications: u64,
    #[arg(long, default_value_t = 500)]
    horizon: u64,
    #[arg(long, default_value_t = 0.3)]
    eta: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyChoice {
    Ucb1,
    Ducb,
    Swucb,
    Exp3s,
    Oracle,
}

#[derive(Args)]
struct LowerboundArgs {
    #[arg(long, value_enum, default_value = "ucb1")]
    policy: PolicyChoice,
    #[arg(long, default_value_t = 0.5)]
    xi: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    tau: Option<u64>,
    /// Base means, arm 1 first and best.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.3")]
    means: Vec<f64>,
    #[arg(long, default_value_t = 0.7)]
    nu: f64,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    /// Number of periods M; mutually exclusive with --period and --auto.
    #[arg(long, conflicts_with_all = ["period", "auto"])]
    blocks: Option<u64>,
    #[arg(long, conflicts_with = "auto")]
    period: Option<u64>,
    /// Choose the period from a pilot estimate of E[N_T(K)].
    #[arg(long)]
    auto: bool,
    #[arg(long, default_value_t = 50)]
    replications: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Increasing horizons for a scan of E*[R_T] ln T / T instead of a single run.
    #[arg(long, value_delimiter = ',')]
    scan: Option<Vec<u64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long, default_value_t = PRESET_HORIZON)]
    horizon: u64,
    #[arg(long, conflicts_with_all = ["beta", "density"])]
    breakpoints: Option<f64>,
    #[arg(long, conflicts_with = "density")]
    beta: Option<f64>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    reward_bound: f64,
    #[arg(long, default_value_t = 3)]
    arms: usize,
}

fn out_dir(flag: Option<PathBuf>, configured: Option<PathBuf>) -> PathBuf {
    flag.or(configured)
        .or_else(|| std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset(
            name,
            args.horizon.unwrap_or(PRESET_HORIZON),
            args.replications.unwrap_or(100),
            args.seed.unwrap_or(1),
        )?,
        _ => bail!("give either a config path or --preset"),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(reps) = args.replications {
        config.replications = reps;
    }
    let dir = out_dir(args.out, config.output_dir.clone());
    let result = run_experiment(&config)?;
    let (per_round, summary) = write_outputs(&result, &dir)?;
    for agg in &result.aggregates {
        println!(
            "{:<8} final regret {} +- {}",
            agg.policy,
            fmt_float(agg.final_mean_regret()),
            fmt_float(agg.final_stderr())
        );
    }
    println!("wrote {} and {}", per_round.display(), summary.display());
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    if args.gamma.is_none() && args.tau.is_none() {
        bail!("give --gamma, --tau or both");
    }
    if let Some(gamma) = args.gamma {
        let report = ducb_regret_bound(&DucbBoundParams {
            gamma,
            xi: args.xi,
            reward_bound: args.reward_bound,
            horizon: args.horizon,
            breakpoints: args.breakpoints,
            gap: args.gap,
            arms: args.arms,
        })?;
        println!("D-UCB gamma={gamma}");
        for (name, value) in report.entries() {
            println!("  {name:<10} {}", fmt_float(value));
        }
        println!("  vacuous    {}", report.vacuous);
        if report.clamped {
            println!("  note: D(gamma) < 0, breakpoint term clamped to 0");
        }
    }
    if let Some(tau) = args.tau {
        let report = swucb_regret_bound(&SwucbBoundParams {
            window: tau,
            xi: args.xi,
            reward_bound: args.reward_bound,
            horizon: args.horizon,
            breakpoints: args.breakpoints,
            gap: args.gap,
        })?;
        println!("SW-UCB tau={tau}");
        for (name, value) in report.entries() {
            println!("  {name:<10} {}", fmt_float(value));
        }
        println!("  vacuous    {}", report.vacuous);
    }
    Ok(())
}

fn concentration(args: ConcentrationArgs) -> Result<()> {
    let mut grid = ConcentrationGrid::standard(args.replications, args.seed);
    grid.horizon = args.horizon;
    grid.eta = args.eta;
    let rows = run_concentration(&grid)?;
    let path = out_dir(args.out, None).join("concentration.csv");
    write_csv(&path, |w| write_concentration(&rows, w))?;
    let bad = rows.iter().filter(|r| !r.consistent).count();
    println!(
        "{} grid points, {bad} above bound + 3 SE; wrote {}",
        rows.len(),
        path.display()
    );
    Ok(())
}

fn write_csv(path: &Path, body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    body(&mut buf)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

fn lowerbound(args: LowerboundArgs) -> Result<()> {
    let arms = args.means.len();
    let spec = match args.policy {
        PolicyChoice::Ucb1 => PolicySpec::Ucb1 {
            xi: args.xi,
            label: None,
        },
        PolicyChoice::Ducb => PolicySpec::Ducb {
            xi: args.xi,
            gamma: match args.gamma {
                Some(g) => g,
                None => reference_gamma(args.horizon)?,
            },
            label: None,
        },
        PolicyChoice::Swucb => PolicySpec::Swucb {
            xi: args.xi,
            tau: args.tau.unwrap_or_else(|| reference_tau(args.horizon)),
            label: None,
        },
        PolicyChoice::Exp3s => {
            let (gamma, alpha) = exp3s_params(arms, args.horizon, 2.0)?;
            PolicySpec::Exp3s {
                gamma,
                alpha,
                label: None,
            }
        }
        PolicyChoice::Oracle => PolicySpec::Oracle { label: None },
    };
    let period = if args.auto {
        PeriodChoice::Auto
    } else if let Some(rounds) = args.period {
        PeriodChoice::Length { rounds }
    } else {
        PeriodChoice::Count {
            count: args.blocks.unwrap_or(10),
        }
    };
    let config = LowerBoundConfig {
        base_means: args.means,
        nu: args.nu,
        period,
        horizon: args.horizon,
        replications: args.replications,
        seed: args.seed,
    };
    let dir = out_dir(args.out, None);
    if let Some(grid) = args.scan {
        let rows = mixture_scan(&spec, &config, &grid)?;
        let path = dir.join("lowerbound_scan.csv");
        write_csv(&path, |w| {
            use std::io::Write;
            writeln!(w, "policy,T,mixture_regret,base_plays_K,ratio")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    spec.label(),
                    r.horizon,
                    fmt_float(r.mixture_regret),
                    fmt_float(r.base_plays_k),
                    fmt_float(r.ratio)
                )?;
            }
            Ok(())
        })?;
        for r in &rows {
            println!(
                "T={:<9} E*[R_T]={:<12.3} ratio={:.5}",
                r.horizon, r.mixture_regret, r.ratio
            );
        }
        println!("wrote {}", path.display());
        return Ok(());
    }
    let report = mixture_regret(&spec, &config)?;
    let episodes = dir.join("lowerbound.csv");
    let summary = dir.join("lowerbound_summary.csv");
    write_csv(&episodes, |w| write_lowerbound_episodes(&report, w))?;
    write_csv(&summary, |w| write_lowerbound_summary(&report, w))?;
    let (value, se) = report.corollary_max();
    println!(
        "{}: E[R_T]={:.3} E*[R_T]={:.3} max={value:.3} (SE {se:.3}) sqrt(C(mu)T)={:.3} C(mu)={:.6}",
        report.policy,
        report.base_regret,
        report.mixture_regret,
        report.corollary_bound,
        report.c_mu
    );
    match report.corollary_holds(3.0) {
        Some(ok) => println!("corollary within 3 SE: {ok}"),
        None => println!("policy reads the environment; comparison skipped"),
    }
    println!("wrote {} and {}", episodes.display(), summary.display());
    Ok(())
}

fn tune_cmd(args: TuneArgs) -> Result<()> {
    let b = args.reward_bound;
    let input = match (args.breakpoints, args.beta, args.density) {
        (Some(breakpoints), None, None) => TuningInput::Breakpoints {
            horizon: args.horizon,
            breakpoints,
            reward_bound: b,
        },
        (None, Some(beta), None) => TuningInput::Growth {
            horizon: args.horizon,
            beta,
            reward_bound: b,
        },
        (None, None, Some(rate)) => TuningInput::Density {
            rate,
            reward_bound: b,
        },
        (None, None, None) => TuningInput::Breakpoints {
            horizon: args.horizon,
            breakpoints: 2.0,
            reward_bound: b,
        },
        _ => bail!("give at most one of --breakpoints, --beta, --density"),
    };
    let tuned = tune(input)?;
    println!("gamma            {}", fmt_float(tuned.gamma));
    println!("tau              {}", tuned.tau);
    println!(
        "reference gamma  {}",
        fmt_float(reference_gamma(args.horizon)?)
    );
    println!("reference tau    {}", reference_tau(args.horizon));
    let upsilon = match input {
        TuningInput::Breakpoints { breakpoints, .. } => breakpoints,
        _ => 2.0,
    };
    let (g, a) = exp3s_params(args.arms, args.horizon, upsilon)?;
    println!("EXP3.S gamma     {}", fmt_float(g));
    println!("EXP3.S alpha     {}", fmt_float(a));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
        Command::Concentration(a) => concentration(a),
        Command::Lowerbound(a) => lowerbound(a),
        Command::Tune(a) => tune_cmd(a),
    }
}
