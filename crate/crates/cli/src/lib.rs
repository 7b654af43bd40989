//! `walklab` experiments: each command reads an [`ExperimentConfig`], runs its
//! replicates on a [`Pool`] and writes CSV batches, `summary.json` and `manifest.json`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pool;

use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

pub use config::{ExperimentConfig, GraphSpec};
pub use error::{CliError, CliResult};
pub use output::RunOutput;
pub use pool::Pool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyIdentity,
    MatsumotoYor,
    TorusRatio,
    Cemetery,
    Accelerate,
    TimeReversal,
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyIdentity => "verify-identity",
            Command::MatsumotoYor => "matsumoto-yor",
            Command::TorusRatio => "torus-ratio",
            Command::Cemetery => "cemetery",
            Command::Accelerate => "accelerate",
            Command::TimeReversal => "time-reversal",
            Command::Selftest => "selftest",
        }
    }
}

/// One acceptance check of a run.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub command: Command,
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
    pub wall_seconds: f64,
}

impl Outcome {
    pub fn new(command: Command) -> Self {
        Self { command, checks: Vec::new(), results: Map::new(), wall_seconds: 0.0 }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn record(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Exit status: 0 all checks passed, 1 a check failed, 2 the run could not start or
/// a precondition failed.
pub fn exit_code(result: &CliResult<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed() => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub fn run(command: Command, mut config: ExperimentConfig, options: &RunOptions) -> CliResult<Outcome> {
    if !config.experiment.is_empty() && config.experiment != command.name() {
        return Err(CliError::Config(format!("config is for `{}`, not `{}`", config.experiment, command.name())));
    }
    if let Some(seed) = options.seed {
        config.seed = Some(seed);
    }
    let seed = config.seed()?;
    let workers = options.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let dir = options.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("runs").join(command.name()));
    let mut out = RunOutput::create(&dir, config.batch_rows.unwrap_or(100_000))?;
    let pool = Pool::new(seed, workers);
    let started = std::time::Instant::now();
    let mut outcome = match command {
        Command::VerifyIdentity => commands::identity::run(&config, &pool, &mut out)?,
        Command::MatsumotoYor => commands::my::run(&config, &pool, &mut out)?,
        Command::TorusRatio => commands::torus::run(&config, &pool, &mut out)?,
        Command::Cemetery => commands::cemetery::run(&config, &pool, &mut out)?,
        Command::Accelerate => commands::accelerate::run(&config, &pool, &mut out)?,
        Command::TimeReversal => commands::reversal::run(&config, &pool, &mut out)?,
        Command::Selftest => commands::selftest::run(&config, &pool, &mut out)?,
    };
    outcome.wall_seconds = started.elapsed().as_secs_f64();
    out.json("summary", &outcome)?;
    let echo = serde_json::to_value(&config)?;
    out.manifest(command.name(), &echo, seed, pool.workers())?;
    Ok(outcome)
}
