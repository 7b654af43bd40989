//! `matsumoto-yor`: the product-ratio pair along growing segments.

use std::sync::Arc;

use walklab_core::graph::build_segment;
use walklab_core::identity::{my_chain, my_chain_recursive, my_markov_test, sample_my_chain, GammaField};
use walklab_core::markov::hitting_prob;
use walklab_core::stats::monitored_conditional_test;
use walklab_core::tol::{rel_diff, IDENTITY_REL, RESIDUAL};

use super::{split_two_sample, write_monitored, BIN_PASS_RATE};
use crate::config::{ChainSpec, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

const STRATA: usize = 3;
const CATEGORIES: usize = 4;

/// Largest relative gap between recursion and closed form, and between
/// `Γ_n e^{−S_n}` and `W(n,n−1) P_n(H_0 < H_n⁺)` from a linear solve.
pub fn recursion_errors(w: &GammaField) -> CliResult<(f64, f64)> {
    let closed = my_chain(w)?;
    let rec = my_chain_recursive(w)?;
    let recursion = closed.iter().zip(&rec).map(|(a, b)| rel_diff(a.gamma, b.gamma).max((a.s - b.s).abs())).fold(0.0, f64::max);
    let n = closed.len();
    let env = w.environment(Arc::new(build_segment(n)?))?;
    let last = closed[n - 1];
    let h_minus = w.get(2 * n - 1) * hitting_prob(&env, n, 0)?;
    Ok((recursion, rel_diff(last.gamma * (-last.s).exp(), h_minus)))
}

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let ChainSpec { alpha, beta, n } = config.chain.unwrap_or(ChainSpec { alpha: 2.0, beta: 1.0, n: 10 });
    if n < 2 {
        return Err(CliError::Config("the Markov check needs chain length n ≥ 2".into()));
    }
    let samples = config.statistical_samples(1_000_000)?;
    let bins = config.bins_for("bins", config.bins, 50, samples)?;
    let markov_bins = config.positive("markov_bins", config.markov_bins, 300)?;
    let fields = config.positive("fields", config.fields, 1000)?;
    let level = config.level()?;
    let order = alpha - beta;
    let mut outcome = Outcome::new(Command::MatsumotoYor);

    // exact checks on separate streams after the statistical ones
    let errors = pool.run(samples as u64, fields, |_, rng| recursion_errors(&sample_my_chain(alpha, beta, n, rng)?.0))?;
    let recursion = errors.iter().map(|e| e.0).fold(0.0, f64::max);
    let solve = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    outcome.check("recursion vs closed form", recursion < IDENTITY_REL, format!("max relative error {recursion:.2e} over {fields} fields"));
    outcome.check("Γe^-S vs linear solve", solve < RESIDUAL, format!("max relative error {solve:.2e}"));

    let unit = my_chain(&GammaField::new(vec![1.0; 2 * n])?)?;
    let rows: Vec<Vec<String>> = unit.iter().enumerate().map(|(k, p)| vec![(k + 1).to_string(), num(p.gamma), num(p.s), num(1.0 / (k + 1) as f64)]).collect();
    out.table("unit_weights", &["n", "gamma", "s", "expected_gamma"], &rows)?;
    let unit_err = unit.iter().enumerate().map(|(k, p)| rel_diff(p.gamma, 1.0 / (k + 1) as f64).max(p.s.abs())).fold(0.0, f64::max);
    outcome.check("unit weights", unit_err < IDENTITY_REL, format!("Γ_k = 1/k within {unit_err:.1e}"));

    // one chain of length n + 1 gives Γ_{n−1}, (Γ_n, S_n) and Γ_{n+1}
    let draws = pool.run(0, samples, |_, rng| {
        let (_, c) = sample_my_chain(alpha, beta, n + 1, rng)?;
        Ok((c[n - 2].gamma, c[n - 1], c[n].gamma))
    })?;
    let rows: Vec<Vec<String>> = draws
        .iter()
        .enumerate()
        .map(|(r, (prev, p, next))| vec![r.to_string(), num(p.gamma), num(p.s), num(p.gamma * p.s.exp()), num(p.gamma * (-p.s).exp()), num(*prev), num(*next)])
        .collect();
    out.batches("chain", &["replicate", "gamma", "s", "h_plus", "h_minus", "gamma_prev", "gamma_next"], &rows)?;

    let pairs: Vec<(f64, f64)> = draws.iter().map(|d| (d.1.gamma, d.1.s)).collect();
    let monitored = monitored_conditional_test(&pairs, order, bins, level)?;
    let detail = write_monitored(out, "conditional", &monitored)?;
    outcome.check("conditional law", monitored.verdict().meets(BIN_PASS_RATE), detail);
    outcome.record("conditional", &monitored);

    let triples: Vec<(f64, f64, f64)> = draws.iter().map(|d| (d.0, d.1.gamma, d.2)).collect();
    let markov = my_markov_test(&triples, markov_bins, STRATA, CATEGORIES, level)?;
    outcome.check(
        "Markov homogeneity",
        markov.passed,
        format!(
            "chi-square {:.1} on {} dof, p = {:.4} ({} Γ_n bins, {STRATA} strata, {CATEGORIES} categories)",
            markov.statistic, markov.dof, markov.p_value, markov_bins
        ),
    );
    outcome.record("markov", &markov);

    if order == 0.0 {
        let r = split_two_sample("S vs -S", &pairs, |p| p.1, |p| -p.1, level)?;
        outcome.check("S vs -S", r.passed(), format!("two-sample KS D = {:.5}, p = {:.4}", r.statistic, r.p_value));
        out.reports("symmetry", std::slice::from_ref(&r))?;
    }
    Ok(outcome)
}
