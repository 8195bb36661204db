//! Command-line driver for the experiment runner.
//!
//! Exit codes: `0` success, `2` a comparison threshold was violated,
//! `3` input/configuration/schema errors (including malformed command
//! lines), `4` numerical or runtime failures.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rpdist::config::ExperimentConfig;
use rpdist::runner::{
    run_compare, run_moments, run_report, run_sample, run_theory, RunnerError, EXIT_INPUT,
    EXIT_OK, EXIT_THRESHOLD,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rpdist",
    version,
    about = "Eigenfunction-component statistics of a Gaussian random-matrix \
             ensemble with tunable off-diagonal coupling",
    long_about = "Samples matrix realizations, measures eigenfunction-component \
                  statistics over spectral windows, tabulates the predicted \
                  densities and moments, and compares the two quantitatively.\n\
                  All randomness flows from one master seed; results are \
                  bit-reproducible at any worker count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (TOML).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the configured master seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Override the configured worker count (0 = one per core).
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Override the configured output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the ensemble and persist component statistics.
    Sample(CommonArgs),
    /// Tabulate the predicted component-density curves.
    Theory(CommonArgs),
    /// Scan component moments across matrix dimensions.
    Moments(CommonArgs),
    /// Fit persisted measurements against the predictions.
    Compare(CommonArgs),
    /// Summarize the artifacts in the output directory.
    Report(CommonArgs),
}

/// Load the configuration and apply command-line overrides; returns the
/// effective config and the output directory.
fn load(common: &CommonArgs) -> Result<(ExperimentConfig, PathBuf), RunnerError> {
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(workers) = common.workers {
        config.workers = workers;
    }
    if let Some(out) = &common.out {
        config.out_dir = out.clone();
    }
    let out = config.out_dir.clone();
    Ok((config, out))
}

fn run(cli: Cli) -> Result<i32, RunnerError> {
    match cli.command {
        Command::Sample(c) => {
            let (config, out) = load(&c)?;
            let summary = run_sample(&config, &out)?;
            println!(
                "sampled {} realizations ({} eigenfunctions, {} failed) -> {} files in {}",
                config.realizations,
                summary.eigenfunctions,
                summary.failed_realizations,
                summary.files.len(),
                out.display()
            );
            Ok(EXIT_OK)
        }
        Command::Theory(c) => {
            let (config, out) = load(&c)?;
            let files = run_theory(&config, &out)?;
            println!("wrote {} theory files in {}", files.len(), out.display());
            Ok(EXIT_OK)
        }
        Command::Moments(c) => {
            let (config, out) = load(&c)?;
            let files = run_moments(&config, &out)?;
            println!("wrote {} moment files in {}", files.len(), out.display());
            Ok(EXIT_OK)
        }
        Command::Compare(c) => {
            let (config, out) = load(&c)?;
            let summary = run_compare(&config, &out, &out)?;
            for v in &summary.violations {
                println!("violation: {v}");
            }
            if summary.pass {
                println!(
                    "all thresholds hold -> {} fit files in {}",
                    summary.files.len(),
                    out.display()
                );
                Ok(EXIT_OK)
            } else {
                println!(
                    "{} threshold violation(s) -> {} fit files in {}",
                    summary.violations.len(),
                    summary.files.len(),
                    out.display()
                );
                Ok(EXIT_THRESHOLD)
            }
        }
        Command::Report(c) => {
            let (_, out) = load(&c)?;
            let text = run_report(&out)?;
            print!("{text}");
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are successes; anything else is
            // an input error.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
