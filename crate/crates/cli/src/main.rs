use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use randbelief_cli::config::{validate, ExperimentConfig};
use randbelief_cli::run::execute;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Runs one named experiment from a JSON config and exports per-seed CSV
/// trajectories plus a JSON summary.
#[derive(Debug, Parser)]
#[command(name = "randbelief", version, about)]
struct Cli {
    /// Path to the experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for trajectory and summary files.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's base seed; seed i becomes N + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppresses the one-line digest.
    #[arg(long)]
    quiet: bool,
    /// Maximum number of seeds run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let text = match fs::read_to_string(&cli.config) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("config error: cannot read {}: {err}", cli.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let raw: ExperimentConfig = match serde_json::from_str(&text) {
        Ok(raw) => raw,
        Err(err) => {
            eprintln!("config error: {err}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let plan = match validate(&raw, cli.seed) {
        Ok(plan) => plan,
        Err(err) => {
            eprintln!("config error: {err}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match execute(&plan, &cli.out, cli.jobs.max(1), cli.quiet) {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("runtime error ({}): {err}", plan.name);
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
