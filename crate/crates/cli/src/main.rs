use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use walklab_cli::{exit_code, run, Command, ExperimentConfig, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "walklab", version, about = "Random walks in Dirichlet environments: exact identities and Monte Carlo checks")]
struct Args {
    command: Command,
    /// Experiment config (TOML). Optional for `selftest`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = match (&args.config, args.command) {
        (Some(path), _) => ExperimentConfig::load(path),
        (None, Command::Selftest) => Ok(ExperimentConfig { experiment: "selftest".into(), seed: Some(1), ..Default::default() }),
        (None, _) => Err(walklab_cli::CliError::Config("--config is required".into())),
    };
    let options = RunOptions { seed: args.seed, out: args.out, workers: args.workers };
    let result = config.and_then(|c| run(args.command, c, &options));
    match &result {
        Ok(outcome) => {
            for c in &outcome.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("{} in {:.1}s", outcome.command.name(), outcome.wall_seconds);
        }
        Err(e) => eprintln!("walklab: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
