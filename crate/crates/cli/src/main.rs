use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ilmdiv::IlmConfig;

mod commands;
mod sweep;

#[derive(Parser)]
#[command(name = "ilmdiv", version, about = "Taylor-series / logarithmic-multiplier division model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the piecewise-linear seed table and print it as CSV.
    Segments {
        /// Polynomial terms the table is designed for.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        iters: u32,
        /// Target precision in bits.
        #[arg(long, default_value_t = 53, value_parser = clap::value_parser!(u32).range(1..))]
        precision: u32,
        /// Write the table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reciprocal of a significand in [1, 2).
    Recip {
        x: String,
        #[command(flatten)]
        engine: EngineArgs,
        /// Print every pipeline stage.
        #[arg(long)]
        trace: bool,
    },
    /// Divide two values (decimal or 0x-prefixed bit patterns).
    Div {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value_t = FormatArg::F64)]
        format: FormatArg,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Accuracy sweep of the reciprocal against an exact oracle.
    Sweep {
        /// Number of uniform random significands.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..),
              required_unless_present = "exhaustive_sig32", conflicts_with = "exhaustive_sig32")]
        samples: Option<u64>,
        /// Every binary32 significand 1 + i * 2^-23.
        #[arg(long)]
        exhaustive_sig32: bool,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (defaults to all cores).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
    },
}

#[derive(clap::Args, Clone, Copy)]
struct EngineArgs {
    /// Highest power of m in the polynomial.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(0..=16))]
    terms: u32,
    /// Multiplier correction terms, or `exact`.
    #[arg(long, default_value = "exact")]
    ilm_iters: IlmConfig,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    #[value(name = "32")]
    F32,
    #[value(name = "64")]
    F64,
}

/// Exit status classes: 1 for runtime failures, 2 for bad input.
pub enum Failure {
    Runtime(anyhow::Error),
    Usage(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Segments { iters, precision, csv } => commands::segments(iters, precision, csv.as_deref()),
        Command::Recip { x, engine, trace } => commands::recip(&x, engine.terms, engine.ilm_iters, trace),
        Command::Div { a, b, format, engine } => {
            let format = match format {
                FormatArg::F32 => ilmdiv::Format::Binary32,
                FormatArg::F64 => ilmdiv::Format::Binary64,
            };
            commands::div(&a, &b, format, engine.terms, engine.ilm_iters)
        }
        Command::Sweep { samples, exhaustive_sig32, engine, csv, seed, jobs } => {
            let source = match samples {
                Some(n) if !exhaustive_sig32 => sweep::Source::Random { samples: n, seed },
                _ => sweep::Source::ExhaustiveSig32,
            };
            sweep::run(source, engine.terms, engine.ilm_iters, &csv, jobs.map(|j| j as usize))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
