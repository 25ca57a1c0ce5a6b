use anytime_cli::commands::{self, CliError};
use anytime_cli::config::ExperimentConfig;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Anytime-reliable tree codes: sampling, certification, thresholds and
/// closed-loop stabilization experiments.
#[derive(Parser)]
#[command(name = "anytime", version, about)]
struct Cli {
    /// JSON experiment configuration; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for all randomness (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of Monte Carlo trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a TZ_p code and write it as code.json.
    SampleCode,
    /// Enumerate the weight spectrum and check anytime distance.
    Certify,
    /// Monte Carlo error-exponent estimate over a BEC.
    Exponent,
    /// Rate/exponent threshold tables for one channel.
    Thresholds,
    /// Stabilizable-region sweep over channel parameters.
    Region,
    /// One closed-loop stabilization run (plus the open-loop reference).
    Stabilize,
    /// Per-label-width distribution of sup |x_t| over random codes.
    PerfCurve,
    /// One streaming decode run with complexity accounting.
    DecodeSim,
    /// Random-walk tracking demo with a k = 1 code.
    RandomWalk,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(CliError::Usage)?,
        None => ExperimentConfig::default(),
    }
    .override_with(cli.seed, cli.trials);
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::SampleCode => commands::cmd_sample_code(&cfg, &out),
        Command::Certify => commands::cmd_certify(&cfg, &out),
        Command::Exponent => commands::cmd_exponent(&cfg, &out),
        Command::Thresholds => commands::cmd_thresholds(&cfg, &out),
        Command::Region => commands::cmd_region(&cfg, &out),
        Command::Stabilize => commands::cmd_stabilize(&cfg, &out),
        Command::PerfCurve => commands::cmd_perf_curve(&cfg, &out),
        Command::DecodeSim => commands::cmd_decode_sim(&cfg, &out),
        Command::RandomWalk => commands::cmd_random_walk(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
