//! Command-line workflows over the `cxrtriage` library.
//!
//! Each command reads its inputs, builds every output in memory, writes the
//! outputs through temporary files renamed into place and finally records a
//! [`RunManifest`] beside its primary output.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;
mod plot;

pub use commands::{CompareArgs, EvalArgs, LabelArgs, SplitArgs, StatsArgs, SynthArgs, WrCurveArgs};
pub use error::CliError;
pub use output::RunManifest;

use commands::{drive, replay, Command};
use config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "cxrtriage", version, about = "Chest X-ray report labeling and triage evaluation")]
pub struct Cli {
    /// TOML file with per-command defaults; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; outputs do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    Label(LabelArgs),
    Stats(StatsArgs),
    Split(SplitArgs),
    Eval(EvalArgs),
    WrCurve(WrCurveArgs),
    Compare(CompareArgs),
    Synth(SynthArgs),
    /// Re-run the command recorded in a manifest and verify its outputs
    Replay(ReplayArgs),
}

#[derive(Debug, clap::Args)]
pub struct ReplayArgs {
    /// A `<output>.manifest.json` written by an earlier run
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Parses `args` (including the program name) and runs the command,
/// returning its stdout summary.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::input(e.to_string()))?;
    execute(cli)
}

pub fn execute(cli: Cli) -> Result<String, CliError> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = cli.threads.or(config.threads);
    if threads == Some(0) {
        return Err(CliError::input("--threads must be at least 1"));
    }
    let outcome = match cli.command {
        CliCommand::Label(a) => with_config(a, config.label, threads),
        CliCommand::Stats(a) => with_config(a, config.stats, threads),
        CliCommand::Split(a) => with_config(a, config.split, threads),
        CliCommand::Eval(a) => with_config(a, config.eval, threads),
        CliCommand::WrCurve(a) => with_config(a, config.wr_curve, threads),
        CliCommand::Compare(a) => with_config(a, config.compare, threads),
        CliCommand::Synth(a) => with_config(a, config.synth, threads),
        CliCommand::Replay(a) => replay(&a.manifest, threads),
    }?;
    Ok(outcome.summary)
}

fn with_config<C: Command>(
    mut args: C,
    base: Option<C>,
    threads: Option<usize>,
) -> Result<commands::RunOutcome, CliError> {
    if let Some(base) = base {
        args.merge(base);
    }
    args.resolve()?;
    drive(&args, threads)
}
