//! `abelinv`: synthesize Abel-transform data, invert it, and run the
//! experiment sweeps and invariant checks.

mod commands;
mod error;
mod io;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use abelinv::{PairId, SelectionRule};
use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "abelinv", version, about = "Inverse Abel transform by Legendre expansion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write samples of a catalog transform on a uniform t-grid.
    Synth(SynthArgs),
    /// Reconstruct f from a sample file.
    Invert(InvertArgs),
    /// Tabulate the forward transform of a catalog solution or an expansion.
    Forward(ForwardArgs),
    /// Repeat noisy inversions over noise levels and seeds.
    Sweep(SweepArgs),
    /// Run the invariant checks and print a JSON ledger.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_parser = parse_pair)]
    pub pair: PairId,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Truncation rule; `morozov` when a noise level is known, else `min-discrepancy`.
    #[arg(long, value_parser = parse_rule)]
    pub select: Option<SelectionRule>,
    #[arg(long, default_value_t = abelinv::regularize::DEFAULT_TAU)]
    pub tau: f64,
    /// Largest candidate N, or the N used by `--select fixed`.
    #[arg(long)]
    pub ncap: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long = "quad-order", default_value_t = abelinv::DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Noise level; defaults to the file's `epsilon` metadata.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub select: SelectArgs,
    /// Points of the uniform x-grid for the reconstruction CSV.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// Output stem: writes STEM.expansion.json, STEM.report.json and
    /// STEM.recon.csv. Without it the report goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    /// Catalog pair whose solution is transformed.
    #[arg(long, value_parser = parse_pair, conflicts_with = "input", required_unless_present = "input")]
    pub pair: Option<PairId>,
    /// Expansion JSON to transform instead of a catalog solution.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 33)]
    pub grid: usize,
    #[arg(long = "quad-order", default_value_t = abelinv::DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_pair)]
    pub pair: PairId,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Comma-separated noise levels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub epsilon: Vec<f64>,
    /// First seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    #[command(flatten)]
    pub select: SelectArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only this check; repeatable.
    #[arg(long)]
    pub check: Vec<String>,
    /// Multiplies every tolerance.
    #[arg(long = "tol-scale", default_value_t = 1.0)]
    pub tol_scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<PairId, String> {
    s.parse().map_err(|e: abelinv::Error| e.to_string())
}

fn parse_rule(s: &str) -> Result<SelectionRule, String> {
    s.parse().map_err(|e: abelinv::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Invert(a) => commands::invert(&a),
        Command::Forward(a) => commands::forward(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
