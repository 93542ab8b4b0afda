//! `regwait`: tables, figure datasets and headline estimates for the waiting
//! time of a DNA word.

mod commands;
mod output;
mod params;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use output::Format;
use params::{Overrides, UsageError};
use regwait_core::Error as CoreError;

#[derive(Parser, Debug)]
#[command(name = "regwait", version, about = "Waiting times for regulatory DNA words")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Worker threads for replication-parallel work
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Plain key=value parameter file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Mean hitting times of the match chain
    Table1,
    /// Self-overlap categories and the initial-condition bound
    Table2,
    /// Total variation bounds at time T
    Table3,
    /// Clump sizes and simulated segment waiting times
    Table4,
    /// Killed fixation chain simulation
    Table5,
    /// Probability of reaching W before 0
    Table6,
    /// Expected hitting times E_x T_y
    Table7,
    /// Hitting times conditioned on the exit side
    Table8,
    /// Segment waiting-time histogram for a good word
    Fig1,
    /// Segment waiting-time histogram for a repetitive word
    Fig2,
    /// Killed-chain histogram for a good word
    Fig3,
    /// Killed-chain histogram for a repetitive word
    Fig4,
    /// Chen-Stein terms for every word of one length
    Scan,
    /// Stopping-time approximation for the fixation chain
    Approx3,
    /// Headline population estimates
    Headline,
    /// Fast analytic checks against published values
    Selftest,
}

fn run(cli: Cli) -> Result<bool> {
    let mut overrides = cli.overrides;
    if let Some(path) = &cli.config {
        overrides.merge_file(path).map_err(|e| UsageError(format!("{e:#}")))?;
    }
    if let Some(n) = cli.threads {
        set_threads(n)?;
    }
    let (report, ok) = match cli.command {
        Command::Selftest => selftest::run(&overrides)?,
        cmd => (commands::run(cmd, &overrides)?, true),
    };
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

#[cfg(not(feature = "parallel"))]
fn set_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::InvalidParameter(_) | CoreError::InvalidWord(_)) => 1,
        Some(CoreError::StepCapExceeded { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("regwait: self-test failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("regwait: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
