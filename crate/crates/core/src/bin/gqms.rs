use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaussian_qms::scenario::{run_to_exit_code, validate_to_exit_code};

#[derive(Parser)]
#[command(name = "gqms", version, about = "Run Gaussian quantum Markov semigroup scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every task of a scenario and write report.json
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        verbose: bool,
    },
    /// Check a scenario file without running it
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Run { config, output_dir, verbose } => run_to_exit_code(&config, output_dir.as_deref(), verbose),
        Command::Validate { config } => validate_to_exit_code(&config),
    };
    ExitCode::from(code as u8)
}
