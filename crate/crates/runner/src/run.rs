//! Batch execution and CSV output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nsbandit::accounting::{aggregate_summaries, AggregateSummary, EpisodeSummary};
use nsbandit::episode::run_replications;
use nsbandit::lowerbound::MixtureRegretReport;
use nsbandit::theory::concentration::{
    exceedance_estimate, sup_exceedance_estimate, SelectionRule, StreamSpec,
};
use nsbandit::{ArmId, EnvironmentSpec, EpisodeConfig};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{io_err, Result};

pub const PER_ROUND_FILE: &str = "per_round.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub horizon: u64,
    pub arms: usize,
    pub frequency_arm: usize,
    pub environment: Arc<EnvironmentSpec>,
    /// One entry per policy, in config order.
    pub aggregates: Vec<AggregateSummary>,
}

impl ExperimentResult {
    pub fn policy(&self, label: &str) -> Option<&AggregateSummary> {
        self.aggregates.iter().find(|a| a.policy == label)
    }
}

/// Run every `(policy, replication)` episode. All policies see the same
/// reward streams for a given replication.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let env = Arc::new(config.scenario.build(config.horizon)?);
    let arms = env.arms();
    let episode = EpisodeConfig::new(
        arms,
        config.horizon,
        env.reward_bound(),
        config.seed,
        config.replications,
    )?;
    let arm = ArmId::new(config.frequency_arm, arms)?;
    let mut aggregates = Vec::with_capacity(config.policies.len());
    for spec in &config.policies {
        let env_ref = Arc::clone(&env);
        let summaries = run_replications(&episode, &env, spec, "", move |trace| {
            EpisodeSummary::from_trace(&trace, &env_ref, arm)
        })?;
        aggregates.push(aggregate_summaries(&spec.label(), &summaries)?);
    }
    Ok(ExperimentResult {
        horizon: config.horizon,
        arms,
        frequency_arm: config.frequency_arm,
        environment: env,
        aggregates,
    })
}

/// `t,policy,mean_regret,stderr_regret,freq_arm`.
pub fn write_per_round<W: Write>(result: &ExperimentResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,policy,mean_regret,stderr_regret,freq_arm")?;
    for agg in &result.aggregates {
        for t in 0..agg.mean_regret.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                t + 1,
                agg.policy,
                fmt_float(agg.mean_regret[t]),
                fmt_float(agg.stderr_regret[t]),
                fmt_float(agg.mean_frequency[t])
            )?;
        }
    }
    Ok(())
}

/// `policy,T,final_mean_regret,final_stderr,bad_plays_1,...,bad_plays_K`,
/// bad plays averaged over replications.
pub fn write_summary<W: Write>(result: &ExperimentResult, mut out: W) -> std::io::Result<()> {
    let bad: Vec<String> = (1..=result.arms)
        .map(|a| format!("bad_plays_{a}"))
        .collect();
    writeln!(
        out,
        "policy,T,final_mean_regret,final_stderr,{}",
        bad.join(",")
    )?;
    for agg in &result.aggregates {
        let plays: Vec<String> = agg.mean_bad_plays.iter().map(|&v| fmt_float(v)).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            agg.policy,
            agg.horizon,
            fmt_float(agg.final_mean_regret()),
            fmt_float(agg.final_stderr()),
            plays.join(",")
        )?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn finish(path: &Path, result: std::io::Result<()>, writer: BufWriter<File>) -> Result<()> {
    result.map_err(io_err(path))?;
    writer
        .into_inner()
        .map_err(|e| e.into_error())
        .and_then(|f| f.sync_all())
        .map_err(io_err(path))
}

pub(crate) fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut writer = create(path)?;
    let result = body(&mut writer);
    finish(path, result, writer)
}

/// Write both CSV files into `dir`; returns their paths.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let per_round = dir.join(PER_ROUND_FILE);
    let summary = dir.join(SUMMARY_FILE);
    write_file(&per_round, |w| write_per_round(result, w))?;
    write_file(&summary, |w| write_summary(result, w))?;
    Ok((per_round, summary))
}

/// One point of a concentration grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub rule: SelectionRule,
    /// `"fixed"` for the deviation at `t`, `"sup"` for the running maximum.
    pub event: &'static str,
    pub gamma: f64,
    pub delta: f64,
    pub horizon: u64,
    pub replications: u64,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationGrid {
    pub gammas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub rules: Vec<SelectionRule>,
    pub success_probability: f64,
    pub eta: f64,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    pub fixed: bool,
    pub sup: bool,
}

impl ConcentrationGrid {
    /// Fair coin, `gamma in {0.9, 0.99, 1}`, `delta in {0.5, 1, 1.5}`, both
    /// built-in rules, `t = 500`, `eta = 0.3`.
    pub fn standard(replications: u64, seed: u64) -> Self {
        Self {
            gammas: vec![0.9, 0.99, 1.0],
            deltas: vec![0.5, 1.0, 1.5],
            rules: vec![
                SelectionRule::Always,
                SelectionRule::RunningMeanBelow { threshold: 0.5 },
            ],
            success_probability: 0.5,
            eta: 0.3,
            horizon: 500,
            replications,
            seed,
            fixed: true,
            sup: true,
        }
    }
}

pub fn run_concentration(grid: &ConcentrationGrid) -> Result<Vec<ConcentrationRow>> {
    let mut rows = Vec::new();
    for &rule in &grid.rules {
        let spec = StreamSpec {
            success_probability: grid.success_probability,
            reward_bound: 1.0,
            rule,
            eta: grid.eta,
        };
        for &gamma in &grid.gammas {
            for &delta in &grid.deltas {
                let mut push = |event, r: nsbandit::theory::concentration::ExceedanceReport| {
                    rows.push(ConcentrationRow {
                        rule,
                        event,
                        gamma,
                        delta,
                        horizon: grid.horizon,
                        replications: grid.replications,
                        empirical: r.empirical,
                        stderr: r.stderr,
                        bound: r.bound,
                        consistent: r.consistent(),
                    })
                };
                if grid.fixed {
                    push(
                        "fixed",
                        exceedance_estimate(
                            &spec,
                            gamma,
                            delta,
                            grid.horizon,
                            grid.replications,
                            grid.seed,
                        )?,
                    );
                }
                if grid.sup {
                    push(
                        "sup",
                        sup_exceedance_estimate(
                            &spec,
                            gamma,
                            delta,
                            grid.horizon,
                            grid.replications,
                            grid.seed,
                        )?,
                    );
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_concentration<W: Write>(rows: &[ConcentrationRow], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "rule,event,gamma,delta,T,replications,empirical,stderr,bound,consistent"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.rule.name(),
            r.event,
            fmt_float(r.gamma),
            fmt_float(r.delta),
            r.horizon,
            r.replications,
            fmt_float(r.empirical),
            fmt_float(r.stderr),
            fmt_float(r.bound),
            r.consistent
        )?;
    }
    Ok(())
}

/// `policy,T,j,replication,regret`; `j = 0` is the base environment.
pub fn write_lowerbound_episodes<W: Write>(
    report: &MixtureRegretReport,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "policy,T,j,replication,regret")?;
    for e in &report.episodes {
        writeln!(
            out,
            "{},{},{},{},{}",
            report.policy,
            report.horizon,
            e.j,
            e.replication,
            fmt_float(e.regret)
        )?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

pub fn write_lowerbound_summary<W: Write>(
    report: &MixtureRegretReport,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(
        out,
        "policy,kind,T,period,blocks,replications,base_regret,base_stderr,mixture_regret,mixture_stderr,\
         base_plays_K,alpha,C_mu,theorem_bound,corollary_bound,precondition_64,precondition_16,\
         theorem_holds,corollary_holds"
    )?;
    let kind = match report.kind {
        nsbandit::PolicyKind::Deterministic => "deterministic",
        nsbandit::PolicyKind::Randomized => "randomized",
        nsbandit::PolicyKind::Clairvoyant => "clairvoyant",
    };
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        report.policy,
        kind,
        report.horizon,
        report.period,
        report.blocks,
        report.replications,
        fmt_float(report.base_regret),
        fmt_float(report.base_regret_stderr),
        fmt_float(report.mixture_regret),
        fmt_float(report.mixture_regret_stderr),
        fmt_float(report.base_plays_k),
        fmt_float(report.alpha),
        fmt_float(report.c_mu),
        opt(report.theorem_bound),
        fmt_float(report.corollary_bound),
        report.precondition_64,
        report.precondition_16,
        opt_bool(report.theorem_holds(3.0)),
        opt_bool(report.corollary_holds(3.0))
    )
}
