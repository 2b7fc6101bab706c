//! `trotter`: command-line driver for the splitting-scheme experiments.

mod bounds;
mod config;
mod evolve;
mod exit;
mod run_dir;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use trotter_experiments::verify::run_verification;
use trotter_experiments::{ExperimentConfig, ExperimentKind, ExperimentOutput};

use crate::bounds::{parse_norms, run_bounds, BoundsConfig};
use crate::config::{load, parse_override};
use crate::evolve::{run_evolve, EvolveConfig};
use crate::exit::{CliError, EXIT_OK};
use crate::run_dir::{RunDir, CONFIG_ECHO};

const DEFAULT_OUTPUT: &str = "runs";

#[derive(Debug, Parser)]
#[command(name = "trotter", version, about = "Splitting schemes for time-dependent Schrodinger operators")]
struct Cli {
    /// TOML config file layered over the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, `key=value` with a TOML value. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Base directory for run directories.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, env = "TROTTER_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operator and vector norms against n.
    NormScaling,
    /// Global errors against n at fixed step count.
    ErrorScaling,
    /// Minimal step count reaching each target error.
    StepsVsEpsilon,
    /// Errors against step count at fixed n.
    OrderStudy,
    /// One trajectory with a chosen scheme.
    Evolve,
    /// Invariant checks; exits 1 if any fails.
    Verify,
    /// Evaluates the operator-norm error bound.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    scheme: Option<String>,
    /// Final time.
    #[arg(short = 'T', long)]
    horizon: Option<f64>,
    /// Number of steps.
    #[arg(short = 'L', long)]
    steps: Option<usize>,
    /// Explicit norms, e.g. `f1=1.5,f2=2,c12=10`; keys f1 f2 df1 df2 d2f1 d2f2 h1 h2 c12 c112 c221.
    #[arg(long)]
    norms: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    discretization: Option<String>,
    #[arg(long)]
    a: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyConfig {
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.report_line());
            e.code
        }
    };
    std::process::exit(code);
}

fn experiment_kind(command: &Command) -> Option<ExperimentKind> {
    match command {
        Command::NormScaling => Some(ExperimentKind::NormScaling),
        Command::ErrorScaling => Some(ExperimentKind::ErrorScaling),
        Command::StepsVsEpsilon => Some(ExperimentKind::StepsVsEpsilon),
        Command::OrderStudy => Some(ExperimentKind::OrderStudy),
        _ => None,
    }
}

/// `--set` values followed by the global flags that map onto config keys.
fn overrides(cli: &Cli, seed: bool, threads: bool) -> Result<Vec<(String, Value)>, CliError> {
    let mut out = cli.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let (true, Some(s)) = (seed, cli.seed) {
        let s = i64::try_from(s).map_err(|_| CliError::config("seed must fit in a signed 64-bit integer"))?;
        out.push(("seed".into(), Value::Integer(s)));
    }
    if let (true, Some(t)) = (threads, cli.threads) {
        out.push(("threads".into(), Value::Integer(t as i64)));
    }
    if let Some(o) = &cli.output {
        out.push(("output".into(), Value::String(o.to_string_lossy().into_owned())));
    }
    Ok(out)
}

fn output_base(configured: &Option<PathBuf>) -> PathBuf {
    configured.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

/// Creates the run directory, echoes the effective config and runs `body`;
/// the manifest is written whether or not `body` succeeds.
fn with_run_dir<F>(base: &Path, name: &str, effective: &Table, seed: Option<u64>, threads: Option<usize>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut RunDir) -> Result<(), CliError>,
{
    let mut dir = RunDir::create(base, name)?;
    let echo = toml::to_string(effective).map_err(|e| CliError::io(format!("cannot encode config: {e}")))?;
    let outcome = dir.write(CONFIG_ECHO, echo).and_then(|()| body(&mut dir));
    let path = dir.path().display().to_string();
    dir.finish(seed, threads, &outcome)?;
    println!("run_dir={path}");
    outcome
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    if let Some(kind) = experiment_kind(&cli.command) {
        return run_experiment(cli, kind);
    }
    match &cli.command {
        Command::Evolve => {
            let (cfg, table) = load(&EvolveConfig::default(), evolve::OPTIONAL_KEYS, cli.config.as_deref(), &overrides(cli, true, true)?)?;
            cfg.validate()?;
            with_run_dir(&output_base(&cfg.output), "evolve", &table, Some(cfg.seed), cfg.threads, |dir| {
                let out = run_evolve(&cfg)?;
                dir.write("state.csv", &out.state_csv)?;
                if let Some(t) = &out.trajectory_csv {
                    dir.write("trajectory.csv", t)?;
                }
                let summary = serde_json::to_string_pretty(&out.summary).map_err(|e| CliError::io(e.to_string()))?;
                dir.write("summary.json", summary)?;
                let s = &out.summary;
                println!("final_norm={} max_norm_drift={:e}", s.final_norm, s.max_norm_drift);
                if let Some(r) = &s.reference {
                    println!("relative_error={:e} reference_steps={}", r.relative_error, r.steps);
                }
                if let Some(v) = &s.vector_bound {
                    println!("vector_bound_factor={:e}", v.bound_factor);
                }
                Ok(())
            })
        }
        Command::Verify => {
            let defaults = VerifyConfig { seed: 7, output: None };
            let (cfg, table) = load(&defaults, &["output"], cli.config.as_deref(), &overrides(cli, true, false)?)?;
            with_run_dir(&output_base(&cfg.output), "verify", &table, Some(cfg.seed), None, |dir| {
                let checks = run_verification(cfg.seed)?;
                for c in &checks {
                    println!(
                        "check {} {} value={:e} threshold={:e} {}",
                        c.name,
                        if c.passed { "PASS" } else { "FAIL" },
                        c.value,
                        c.threshold,
                        c.detail
                    );
                }
                let json = serde_json::to_string_pretty(&checks).map_err(|e| CliError::io(e.to_string()))?;
                dir.write("verify.json", json)?;
                let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                if failed.is_empty() {
                    Ok(())
                } else {
                    Err(CliError::failed(format!("failed checks: {}", failed.join(", "))))
                }
            })
        }
        Command::Bounds(args) => {
            let mut set = overrides(cli, false, false)?;
            if let Some(s) = &args.scheme {
                set.push(("scheme".into(), Value::String(s.to_ascii_lowercase())));
            }
            if let Some(t) = args.horizon {
                set.push(("horizon".into(), Value::Float(t)));
            }
            if let Some(l) = args.steps {
                set.push(("steps".into(), Value::Integer(l as i64)));
            }
            if let Some(n) = args.n {
                set.push(("n".into(), Value::Integer(n as i64)));
            }
            if let Some(d) = &args.discretization {
                set.push(("discretization".into(), Value::String(d.clone())));
            }
            if let Some(a) = args.a {
                set.push(("a".into(), Value::Float(a)));
            }
            if let Some(text) = &args.norms {
                set.push(("norms".into(), parse_norms(text)?));
            }
            let (cfg, table) = load(&BoundsConfig::default(), bounds::OPTIONAL_KEYS, cli.config.as_deref(), &set)?;
            cfg.validate()?;
            with_run_dir(&output_base(&cfg.output), "bounds", &table, None, None, |dir| {
                let report = run_bounds(&cfg)?;
                println!("scheme={}", report.scheme.id());
                println!("alpha={}", report.alpha);
                if let Some(b) = report.beta {
                    println!("beta={b}");
                }
                if let Some(g) = report.gamma {
                    println!("gamma={g}");
                }
                println!("bound={}", report.bound);
                let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::io(e.to_string()))?;
                dir.write("bounds.json", json)
            })
        }
        _ => unreachable!("experiment subcommands are handled above"),
    }
}

fn run_experiment(cli: &Cli, kind: ExperimentKind) -> Result<(), CliError> {
    let (cfg, table): (ExperimentConfig, Table) = load(
        &ExperimentConfig::defaults(kind),
        &["reference_tol", "threads", "output"],
        cli.config.as_deref(),
        &overrides(cli, true, true)?,
    )?;
    if cfg.experiment != kind {
        return Err(CliError::config(format!("config is for '{}' but the subcommand is '{kind}'", cfg.experiment)));
    }
    cfg.validate()?;
    with_run_dir(&output_base(&cfg.output), kind.id(), &table, Some(cfg.seed), cfg.threads, |dir| {
        let out: ExperimentOutput = trotter_experiments::run(&cfg)?;
        out.write_csv_file(&dir.file("results.csv"))?;
        dir.write("summary.json", out.summary_json()?)?;
        for s in &out.slopes {
            println!(
                "slope {} scheme={} discretization={} quantity={} against={} slope={:.4} r2={:.4}{}",
                s.experiment,
                s.scheme.map_or("-", |x| x.id()),
                s.discretization.map_or("-", |d| d.id()),
                s.quantity,
                s.against,
                s.slope,
                s.r2,
                if s.flagged { " flagged" } else { "" }
            );
        }
        Ok(())
    })
}
