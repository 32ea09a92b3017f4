use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ioentropy::experiment::{cmd_coin, cmd_pennies, Experiment, RunConfig};
use ioentropy::verify::{run_verify, Fault, VerifyConfig};
use ioentropy::SimError;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Laplace agent predicting a biased coin
    Coin,
    /// Two smooth fictitious-play players at matching pennies
    Pennies,
    /// Run the exact identity checks
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    KlSign,
}

/// Entropy dynamics of interacting I/O systems.
#[derive(Debug, Parser)]
#[command(name = "ioentropy", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Number of interaction steps [default: 1000 for coin, 5000 for pennies]
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = ioentropy::experiment::DEFAULT_SEED)]
    seed: u64,
    /// Probability that the coin lands heads
    #[arg(long, default_value_t = ioentropy::experiment::DEFAULT_BIAS)]
    bias: f64,
    /// Inverse temperature of the fictitious-play policies
    #[arg(long, default_value_t = ioentropy_core::agents::DEFAULT_SFP_ALPHA)]
    alpha: f64,
    /// CSV trace path [default: <command>_trace.csv]
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print a summary of the run
    #[arg(long)]
    summary: bool,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

fn report(e: &SimError) -> ExitCode {
    eprintln!("ioentropy: {e}");
    match e {
        SimError::Config(_) => ExitCode::from(EXIT_USAGE),
        _ => ExitCode::from(EXIT_FAILURE),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let experiment = match cli.command {
        Command::Coin => Experiment::Coin,
        Command::Pennies => Experiment::Pennies,
        Command::Verify => Experiment::Verify,
    };
    let mut config = RunConfig::new(experiment);
    if let Some(steps) = cli.steps {
        config.steps = steps;
    }
    config.seed = cli.seed;
    config.bias = cli.bias;
    config.alpha = cli.alpha;
    config.output_path = cli.output;
    config.summary = cli.summary;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match experiment {
        Experiment::Coin => cmd_coin(&config, &mut out).map(|_| true),
        Experiment::Pennies => cmd_pennies(&config, &mut out).map(|_| true),
        Experiment::Verify => {
            let fault = match cli.inject_fault {
                Some(FaultArg::KlSign) => Fault::KlSign,
                None => Fault::None,
            };
            config.validate().and_then(|()| {
                let report = run_verify(&VerifyConfig { fault, ..VerifyConfig::new(config.seed) })?;
                let _ = writeln!(out, "{report}");
                for c in report.failures() {
                    eprintln!("ioentropy: check failed: {}", c.name);
                }
                Ok(report.passed())
            })
        }
    };
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e) => report(&e),
    }
}
