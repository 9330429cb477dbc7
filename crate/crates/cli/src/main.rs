//! `soarsim`: run scenarios, convergence studies and self-checks.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand};
use log::info;

use soarsim::config::RunConfig;
use soarsim::harness::{
    convergence_study, estimate_theta_opt, run_episode, write_summary_json, write_theta_csv,
    write_trace_csv, EpisodeOptions, ScenarioKind,
};
use soarsim::rng::rollout_seed;
use soarsim::selfcheck;

#[derive(Debug, Parser)]
#[command(
    name = "soarsim",
    version,
    about = "Thermal-soaring glider simulator with an online Q-learning controller"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by `run` and `converge`; each flag overrides the
/// matching configuration key.
#[derive(Debug, clap::Args)]
struct RunArgs {
    /// still-air, thermal-birth, thermal-death or multi-thermal.
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `key = value` configuration file; unset keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Control and integration period in seconds. The per-step bank and
    /// sideslip increments are rescaled so that their rates are unchanged.
    #[arg(long)]
    dt: Option<f64>,
    /// Episode duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fly one episode and write trace.csv, theta.csv, summary.json and config.resolved.
    Run(RunArgs),
    /// Estimate the converged weights, then measure ‖θ_t − θ_opt‖₂ over many roll-outs.
    Converge {
        #[command(flatten)]
        args: RunArgs,
        /// Number of roll-outs (at least 2).
        #[arg(long)]
        rollouts: Option<usize>,
    },
    /// Run the numerical self-checks and print a pass/fail table.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

fn resolve(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(kind) = args.scenario {
        cfg.scenario = kind;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(dt) = args.dt {
        let ratio = dt / cfg.dt;
        cfg.delta_mu_deg *= ratio;
        cfg.delta_beta_deg *= ratio;
        cfg.dt = dt;
    }
    if let Some(duration) = args.duration {
        cfg.duration = duration;
    }
    // Overrides go through the same text path as the file so that the
    // echoed configuration re-parses to exactly this value.
    let cfg = RunConfig::parse(&cfg.emit()).context("resolving configuration")?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn prepare_out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&cfg.out_dir);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.resolved"), cfg.emit()).context("writing config.resolved")?;
    Ok(dir)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = resolve(args)?;
    let dir = prepare_out_dir(&cfg)?;
    let scenario = cfg.scenario_spec();
    info!(
        "running {} for {} s with seed {}",
        scenario.kind, scenario.duration, cfg.seed
    );
    let out = run_episode(
        &scenario,
        &cfg.sim_config(),
        &cfg.agent_config(),
        cfg.seed,
        &EpisodeOptions::default(),
    )?;
    write_trace_csv(create(&dir, "trace.csv")?, &out.trace)?;
    write_theta_csv(create(&dir, "theta.csv")?, &out.theta_history)?;
    write_summary_json(create(&dir, "summary.json")?, &out.summary, &cfg)?;
    if let Some(reason) = &out.summary.abort_reason {
        log::warn!("episode aborted: {reason}");
    }
    println!(
        "{}: flight time {:.1} s, energy {:.2} m -> {:.2} m, outputs in {}",
        scenario.kind,
        out.summary.flight_time,
        out.summary.initial_energy,
        out.summary.final_energy,
        dir.display()
    );
    Ok(())
}

fn cmd_converge(args: &RunArgs, rollouts: Option<usize>) -> Result<()> {
    let mut cfg = resolve(args)?;
    if let Some(n) = rollouts {
        if n < 2 {
            bail!("--rollouts must be at least 2 to define a standard deviation (got {n})");
        }
        cfg.rollouts = n;
    }
    let dir = prepare_out_dir(&cfg)?;
    let scenario = cfg.scenario_spec();
    let sim = cfg.sim_config();
    let agent = cfg.agent_config();

    info!(
        "estimating converged weights from {} runs of {}",
        cfg.theta_opt_runs, scenario.kind
    );
    let estimate = estimate_theta_opt(
        &scenario,
        &sim,
        &agent,
        cfg.theta_opt_runs,
        cfg.settle_time,
        rollout_seed(cfg.seed, 0),
    )?;
    info!("running {} roll-outs", cfg.rollouts);
    let report = convergence_study(
        &scenario,
        &sim,
        &agent,
        &estimate.theta,
        cfg.rollouts,
        cfg.adaptation_threshold,
        rollout_seed(cfg.seed, 1),
    )?;

    let mut theta = create(&dir, "theta_opt.csv")?;
    writeln!(theta, "index,theta")?;
    for (i, w) in estimate.theta.iter().enumerate() {
        writeln!(theta, "{i},{w}")?;
    }
    theta.flush()?;

    let mut curve = create(&dir, "convergence.csv")?;
    writeln!(curve, "t,mean,std")?;
    for ((t, m), s) in report.times.iter().zip(&report.mean).zip(&report.std) {
        writeln!(curve, "{t},{m},{s}")?;
    }
    curve.flush()?;

    let mut json = create(&dir, "convergence.json")?;
    serde_json::to_writer_pretty(
        &mut json,
        &serde_json::json!({
            "scenario": report.scenario,
            "seed": cfg.seed,
            "n_rollouts": report.n_rollouts,
            "threshold_fraction": report.threshold_fraction,
            "adaptation_time": report.adaptation_time,
            "aborted_rollouts": report.aborted,
            "theta_opt_drift": estimate.drift,
            "theta_opt_stable": estimate.stable,
            "config": cfg,
        }),
    )?;
    writeln!(json)?;
    json.flush()?;

    match report.adaptation_time {
        Some(t) => println!(
            "{}: adaptation time {t:.1} s over {} roll-outs, outputs in {}",
            report.scenario,
            report.n_rollouts,
            dir.display()
        ),
        None => println!(
            "{}: mean distance never fell to {:.0}% of its initial value over {} roll-outs, outputs in {}",
            report.scenario,
            100.0 * report.threshold_fraction,
            report.n_rollouts,
            dir.display()
        ),
    }
    Ok(())
}

fn cmd_validate(config: Option<&Path>) -> Result<bool> {
    let cfg = load_config(config)?;
    let checks = selfcheck::run_all(&cfg.aircraft_config())?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    println!(
        "{:<width$}  {:>12}  {:>12}  {:>10}  result",
        "check", "measured", "expected", "tolerance"
    );
    for c in &checks {
        println!(
            "{:<width$}  {:>12.6e}  {:>12.6e}  {:>10.1e}  {}",
            c.name,
            c.measured,
            c.expected,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(checks.iter().all(|c| c.passed))
}

/// Prints the error and the help of the subcommand it concerns.
fn usage_error(err: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    if matches!(
        err.kind(),
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
    ) {
        let _ = err.print();
        return ExitCode::SUCCESS;
    }
    let _ = err.print();
    let mut cmd = Cli::command();
    cmd.build();
    let sub = std::env::args()
        .skip(1)
        .find(|a| cmd.get_subcommands().any(|s| s.get_name() == a));
    eprintln!();
    let help = match sub {
        Some(name) => cmd
            .find_subcommand_mut(&name)
            .map(|s| s.render_help())
            .unwrap_or_else(|| Cli::command().render_help()),
        None => cmd.render_help(),
    };
    eprintln!("{help}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => return usage_error(err),
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|()| true),
        Command::Converge { args, rollouts } => cmd_converge(args, *rollouts).map(|()| true),
        Command::Validate { config } => cmd_validate(config.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more self-checks failed");
            ExitCode::FAILURE
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
