//! `accelerate`: the acceleration function `γ(ω) = 1 / Σ_{σ ∈ Π_Λ} ω_σ` and trap strengths κ(Λ).

use std::sync::Arc;

use serde::Serialize;
use walklab_core::graph::lattice::{acceleration, enumerate_paths_pi_lambda, kappa_global, kappa_of_lambda, Region};
use walklab_core::graph::{build_torus, Torus};
use walklab_core::markov::Environment;
use walklab_core::stats::EmpiricalDistribution;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

#[derive(Debug, Clone, Serialize)]
struct BoxSummary {
    radius: i32,
    paths: usize,
    kappa: f64,
    min_gamma: f64,
    median_gamma: f64,
    max_gamma: f64,
}

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let radii = config.boxes.clone().unwrap_or_else(|| vec![0, 1]);
    let alpha = config.torus_alpha();
    let samples = config.positive("samples", config.samples, 1000)?;
    if radii.iter().any(|&r| r < 0) || radii.is_empty() {
        return Err(CliError::Config("box half-widths must be non-negative".into()));
    }
    let kappa = kappa_global(&alpha)?;
    // large enough that no confined path wraps around
    let size = radii.iter().max().copied().unwrap_or(0) as usize + 2;
    let torus = Torus::new(size);
    let (g, weights) = build_torus(size, alpha)?;
    let graph = Arc::new(g);
    let origin = torus.vertex([0, 0]);
    let boxes: Vec<(i32, Region)> = radii.iter().map(|&r| (r, Region::square(r))).collect();
    let paths = boxes.iter().map(|(_, b)| enumerate_paths_pi_lambda(b)).collect::<Result<Vec<_>, _>>()?;

    let draws = pool.run(0, samples, |_, rng| {
        let env = Environment::sample_dirichlet(graph.clone(), &weights, rng)?;
        Ok(paths.iter().map(|p| acceleration(p, &torus, env.prob(), origin)).collect::<Vec<f64>>())
    })?;
    let rows: Vec<Vec<String>> =
        draws.iter().enumerate().flat_map(|(r, g)| radii.iter().zip(g).map(move |(rad, v)| vec![r.to_string(), rad.to_string(), num(*v)])).collect();
    out.batches("acceleration", &["replicate", "radius", "gamma"], &rows)?;

    let mut outcome = Outcome::new(Command::Accelerate);
    let mut summaries = Vec::new();
    for (k, (r, b)) in boxes.iter().enumerate() {
        let values = EmpiricalDistribution::new(draws.iter().map(|g| g[k]).collect())?;
        let k_lambda = kappa_of_lambda(b, alpha)?;
        let v = values.values();
        let summary =
            BoxSummary { radius: *r, paths: paths[k].len(), kappa: k_lambda, min_gamma: v[0], median_gamma: values.median(), max_gamma: v[v.len() - 1] };
        // confined exit paths are disjoint walk events, so their total weight is at most one
        let in_range = v.iter().all(|&g| g.is_finite() && g >= 1.0 - 1e-12);
        outcome.check(
            &format!("path sum in (0, 1], radius {r}"),
            in_range,
            format!("{} paths, γ(ω) in [{:.6}, {:.6}]", summary.paths, summary.min_gamma, summary.max_gamma),
        );
        if *r == 0 {
            let worst = v.iter().map(|g| (g - 1.0).abs()).fold(0.0, f64::max);
            outcome.check("single-site box", worst < 1e-12, format!("max |γ(ω) − 1| = {worst:.1e}"));
        }
        outcome.check(&format!("κ(Λ) ≥ κ, radius {r}"), k_lambda >= kappa - 1e-12, format!("κ(Λ) = {k_lambda}, κ = {kappa}"));
        summaries.push(summary);
    }
    let table: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| vec![s.radius.to_string(), s.paths.to_string(), num(s.kappa), num(s.min_gamma), num(s.median_gamma), num(s.max_gamma)])
        .collect();
    out.table("boxes", &["radius", "paths", "kappa_lambda", "min_gamma", "median_gamma", "max_gamma"], &table)?;
    outcome.record("kappa_global", kappa);
    outcome.record("boxes", &summaries);
    Ok(outcome)
}
