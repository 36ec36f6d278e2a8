//! Batch front-end for the vibronic spectrum library: molecule files in,
//! CSV profiles and decomposition reports out, plus a seeded self-check.

mod cmd;
mod config;
mod molecule;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::ConfigArgs;

/// Everything that can stop a run, sorted by exit code: 2 for bad input,
/// 3 for a refused cost guard, 4 for a failed numerical cross-check, and
/// 1 for anything unexpected.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Guard(String),
    Mismatch(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Guard(m) | Failure::Mismatch(m) | Failure::Internal(m) => {
                m
            }
        }
    }

    /// Library errors during computation: cost guards keep their identity,
    /// the rest is unexpected.
    pub fn from_core(e: vibronic_core::Error) -> Self {
        if e.is_resource_guard() {
            Failure::Guard(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }

    /// Library errors while building state from user input.
    pub fn from_input(e: vibronic_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    /// Enumerate thermal initial states one by one
    Direct,
    /// Purify the thermal input and herald it on doubled modes
    Extended,
    /// Run both and cross-check them bin by bin
    Both,
}

#[derive(Parser)]
#[command(
    name = "vibronic",
    version,
    about = "Vibronic spectra through Gaussian optical circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Franck-Condon profile and write it as CSV
    Spectrum {
        /// Molecule description (JSON)
        file: PathBuf,
        /// Which construction computes the profile
        #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
        route: RouteArg,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print the transition's transform and its optical factorizations
    Decompose {
        /// Molecule description (JSON)
        file: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the seeded self-check suites
    Verify {
        /// Seed for every random draw the suites make
        #[arg(long, env = "VIBRONIC_SEED", default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum {
            file,
            route,
            out,
            config,
        } => cmd::spectrum::run(&file, route, out.as_deref(), &config),
        Command::Decompose { file, config } => cmd::decompose::run(&file, &config),
        Command::Verify { seed, config } => cmd::verify::run(seed, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
