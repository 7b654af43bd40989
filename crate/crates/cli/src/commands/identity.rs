//! `verify-identity`: the conditional law of `S` given `Γ` for hitting probabilities.

use std::sync::Arc;

use serde_json::json;
use walklab_core::identity::IdentitySetup;
use walklab_core::stats::monitored_conditional_test;

use super::{split_two_sample, write_monitored, BIN_PASS_RATE};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let (spec, built) = config.graph()?;
    let (i0, j0) = config.marked_pair(spec, &built)?;
    let samples = config.statistical_samples(100_000)?;
    let bins = config.bins_for("bins", config.bins, 50, samples)?;
    let level = config.level()?;
    let setup = IdentitySetup::new(Arc::new(built.graph), built.alpha, i0, j0)?;
    let gamma = setup.gamma();

    let draws = pool.run(0, samples, |_, rng| Ok(setup.sample(rng)?))?;
    let rows: Vec<Vec<String>> =
        draws.iter().enumerate().map(|(r, d)| vec![r.to_string(), num(d.gamma_stat), num(d.s_stat), num(d.h_plus), num(d.h_minus)]).collect();
    out.batches("identity", &["replicate", "gamma", "s", "h_plus", "h_minus"], &rows)?;

    let mut outcome = Outcome::new(Command::VerifyIdentity);
    outcome.record("marked", json!({ "i0": i0, "j0": j0, "gamma": gamma }));
    let pairs: Vec<(f64, f64)> = draws.iter().map(|d| (d.gamma_stat, d.s_stat)).collect();
    let monitored = monitored_conditional_test(&pairs, gamma, bins, level)?;
    let detail = write_monitored(out, "conditional", &monitored)?;
    outcome.check("conditional law", monitored.verdict().meets(BIN_PASS_RATE), detail);
    outcome.record("conditional", &monitored);

    if gamma.abs() < 1e-12 {
        let s = split_two_sample("S vs -S", &draws, |d| d.s_stat, |d| -d.s_stat, level)?;
        let h = split_two_sample("H+ vs H-", &draws, |d| d.h_plus, |d| d.h_minus, level)?;
        for r in [&s, &h] {
            outcome.check(&r.name, r.passed(), format!("two-sample KS D = {:.5}, p = {:.4}", r.statistic, r.p_value));
        }
        out.reports("symmetry", &[s.clone(), h.clone()])?;
        outcome.record("symmetry", [s, h]);
    }
    Ok(outcome)
}
