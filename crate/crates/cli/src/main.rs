use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smpctune_cli::commands;
use smpctune_cli::config::ExperimentConfig;
use smpctune_cli::error::Result;

/// Tunes the parameters of a simulated multi-party computation with
/// tabular Q-learning and benchmarks it against grid and random search.
#[derive(Parser)]
#[command(name = "smpctune", version)]
struct Cli {
    /// Flat TOML config file; all keys optional, defaults used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's out_dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated seed list (overrides the config's seeds).
    #[arg(long, global = true, value_name = "INT,INT,...", value_delimiter = ',')]
    seed: Option<Vec<u64>>,

    /// Episode count (overrides the config's episodes).
    #[arg(long, global = true, value_name = "INT")]
    episodes: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price every grid state: oracle.csv and oracle_summary.json.
    Oracle,
    /// Train one learner per seed: train.csv and qtable.json.
    Train,
    /// Benchmark qlearn vs grid vs random: compare.csv and compare_summary.txt.
    Compare,
    /// Continuous run under network drift: drift.csv.
    Drift,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    if let Some(seeds) = cli.seed {
        cfg.seeds = seeds;
    }
    if let Some(episodes) = cli.episodes {
        cfg.episodes = episodes;
    }
    cfg.validate()?;
    match cli.command {
        Command::Oracle => commands::oracle::run(&cfg),
        Command::Train => commands::train::run(&cfg),
        Command::Compare => commands::compare::run(&cfg),
        Command::Drift => commands::drift::run(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("smpctune: {err}");
            err.exit_code()
        }
    }
}
