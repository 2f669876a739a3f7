//! `twirl`: build twirling-semigroup generators from a JSON run config,
//! extract GKLS forms, evolve states, cross-check against Monte-Carlo path
//! sampling, and run verification and convergence studies.
//!
//! Exit codes: 0 ok, 1 verification failed, 2 config error, 3 numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twirl_cli::{commands, config, CliError, Overrides};

#[derive(Parser)]
#[command(
    name = "twirl",
    version,
    about = "Twirling-semigroup generators, GKLS forms and Monte-Carlo cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for result files.
    #[arg(long, default_value = "twirl-out")]
    out: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the generator, its GKLS canonical form and channel reports.
    Generator(RunArgs),
    /// Compare the Monte-Carlo twirl estimate against the exact evolution.
    Crosscheck(RunArgs),
    /// Truncation (m), step-size (dt) or sample-count (n) convergence study.
    Convergence(RunArgs),
    /// CPTP/CCP verification, covariance membership, embeddability heuristic.
    Verify(RunArgs),
    /// Classical Lévy–Khintchine oracle comparison on a charge representation.
    Oracle(RunArgs),
}

fn load_config(path: &PathBuf) -> Result<config::RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("parsing config: {e}")))
}

fn run(command: &Command) -> Result<commands::Outcome, CliError> {
    let (args, runner): (&RunArgs, fn(_, _, _) -> _) = match command {
        Command::Generator(a) => (a, commands::cmd_generator as fn(_, _, _) -> _),
        Command::Crosscheck(a) => (a, commands::cmd_crosscheck),
        Command::Convergence(a) => (a, commands::cmd_convergence),
        Command::Verify(a) => (a, commands::cmd_verify),
        Command::Oracle(a) => (a, commands::cmd_oracle),
    };
    let cfg = load_config(&args.config)?;
    let overrides = Overrides {
        seed: args.seed,
        tol: args.tol,
    };
    runner(&cfg, &args.out, &overrides)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(outcome) => {
            if outcome.passed {
                ExitCode::from(0)
            } else {
                eprintln!("verification failed (see report files)");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Numeric(_) | CliError::Io(_) => ExitCode::from(3),
            }
        }
    }
}
