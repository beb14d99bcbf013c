use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use log::warn;
use qnsch::io::{self, RunConfig, RunOutcome, CONFIG_ECHO};
use qnsch::verify::run_suites;

/// Simulate and audit the quasi-incompressible NSCH/Korteweg model.
///
/// Exit codes: 0 ok, 1 usage or failed check, 2 confinement abort,
/// 3 divergence, 4 checkpoint error. QNSCH_THREADS caps the worker threads.
#[derive(Parser, Debug)]
#[command(name = "qnsch", version)]
struct Cli {
    /// Configuration file (`key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--override scheme.dt=1e-4` (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output directory (simulate, resume) or report file (verify)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Only print errors
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run from t = 0 and write diagnostics, checkpoints and a summary
    Simulate,
    /// Run verification suites and print a JSON report
    Verify {
        /// Suites to run: algebra, operators, potentials, scheme or all
        #[arg(default_value = "all")]
        suites: Vec<String>,
    },
    /// Continue a run from a checkpoint
    Resume {
        checkpoint: PathBuf,
    },
    /// Write gnuplot scripts next to a diagnostics CSV
    Plot {
        csv: PathBuf,
    },
}

fn load_config(cli: &Cli, fallback: Option<&Path>) -> qnsch::Result<RunConfig> {
    let mut cfg = match (&cli.config, fallback) {
        (Some(p), _) => RunConfig::load(p)?,
        (None, Some(p)) if p.exists() => RunConfig::load(p)?,
        _ => RunConfig::default(),
    };
    cfg.apply_overrides(&cli.overrides)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn report(outcome: &RunOutcome, quiet: bool) -> i32 {
    let s = &outcome.summary;
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    } else if !quiet {
        println!(
            "{} steps {}..{} at dt = {:e}, t = {:.6}",
            s.status, s.start_step, s.final_step, s.dt, s.final_time
        );
        if let Some(d) = &s.drift {
            println!(
                "drift: mass {:.3e}, phase {:.3e}, momentum {:.3e}",
                d.mass_rho, d.mass_phi, d.momentum
            );
        }
        println!("density range [{:.6}, {:.6}]", s.rho_min, s.rho_max);
    }
    outcome.exit_code()
}

fn run(cli: &Cli) -> qnsch::Result<i32> {
    match &cli.command {
        Command::Simulate => {
            let cfg = load_config(cli, None)?;
            let outcome = io::simulate(&cfg)?;
            Ok(report(&outcome, cli.quiet))
        }
        Command::Resume { checkpoint } => {
            let echo = checkpoint.parent().map(|d| d.join(CONFIG_ECHO));
            let cfg = load_config(cli, echo.as_deref())?;
            let outcome = io::resume(checkpoint, &cfg)?;
            Ok(report(&outcome, cli.quiet))
        }
        Command::Verify { suites } => {
            let rep = run_suites(suites)?;
            let text = serde_json::to_string_pretty(&rep).expect("report serializes");
            match &cli.out {
                Some(p) => std::fs::write(p, text + "\n")?,
                None => println!("{text}"),
            }
            if !cli.quiet {
                for s in &rep.suites {
                    let failed: Vec<&str> = s
                        .checks
                        .iter()
                        .filter(|c| !c.passed)
                        .map(|c| c.name.as_str())
                        .collect();
                    if failed.is_empty() {
                        eprintln!("{}: pass ({} checks)", s.suite, s.checks.len());
                    } else {
                        eprintln!("{}: FAIL {}", s.suite, failed.join(", "));
                    }
                }
            }
            Ok(if rep.passed { 0 } else { 1 })
        }
        Command::Plot { csv } => {
            let written = io::write_plot_scripts(csv)?;
            if !cli.quiet {
                for p in written {
                    println!("{}", p.display());
                }
            }
            Ok(0)
        }
    }
}

fn set_threads() {
    let Ok(v) = std::env::var("QNSCH_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                warn!("could not size the thread pool: {e}");
            }
        }
        _ => warn!("ignoring QNSCH_THREADS={v}: not a positive integer"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    set_threads();
    let code = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
