//! `time-reversal`: the reversed environment of a zero-divergence Dirichlet environment
//! against fresh draws with the reversed weights.

use std::sync::Arc;

use walklab_core::graph::{divergence, reverse};
use walklab_core::markov::{reversed_environment, Environment};
use walklab_core::stats::{ks_two_sample, EmpiricalDistribution, TestReport};
use walklab_core::tol::DIVERGENCE_GATE;
use walklab_core::WalkError;

use crate::config::{ExperimentConfig, GraphSpec};
use crate::error::CliResult;
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let default = GraphSpec::Torus { n: 2, alpha: [1.0, 2.0, 1.0, 2.0] };
    let spec = config.graph.clone().unwrap_or(default);
    let built = spec.build(&config.base_dir)?;
    let samples = config.statistical_samples(100_000)?;
    let level = config.level()?;
    let div = divergence(&built.graph, &built.alpha)?;
    if div.max_abs() > DIVERGENCE_GATE {
        return Err(WalkError::Precondition(format!("time reversal needs zero divergence, max |div| = {:e}", div.max_abs())).into());
    }
    let focus = match (config.pair, &built.torus) {
        (Some([v, _]), _) => v,
        (None, Some(t)) => t.vertex([0, 0]),
        (None, None) => 0,
    };
    built.graph.check_vertex(focus)?;
    let (rg, ralpha) = reverse(&built.graph, &built.alpha)?;
    let graph = Arc::new(built.graph);
    let reversed = Arc::new(rg);
    let edges = graph.edge_count();

    let draws = pool.run(0, samples, |_, rng| {
        let env = Environment::sample_dirichlet(graph.clone(), &built.alpha, rng)?;
        let rev = reversed_environment(&env)?;
        let fresh = Environment::sample_dirichlet(reversed.clone(), &ralpha, rng)?;
        Ok((rev.prob().to_vec(), fresh.prob().to_vec()))
    })?;
    let gated: Vec<usize> = reversed.out_edges(focus).to_vec();
    let rows: Vec<Vec<String>> = draws
        .iter()
        .enumerate()
        .map(|(r, (rev, fresh))| {
            let mut row = vec![r.to_string()];
            row.extend(gated.iter().map(|&e| num(rev[e])));
            row.extend(gated.iter().map(|&e| num(fresh[e])));
            row
        })
        .collect();
    let mut header = vec!["replicate".to_string()];
    header.extend(gated.iter().map(|e| format!("reversed_{e}")));
    header.extend(gated.iter().map(|e| format!("fresh_{e}")));
    out.batches("reversal", &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;

    let reports = (0..edges)
        .map(|e| {
            let a = EmpiricalDistribution::new(draws.iter().map(|d| d.0[e]).collect())?;
            let b = EmpiricalDistribution::new(draws.iter().map(|d| d.1[e]).collect())?;
            let (x, y) = reversed.edge(e);
            Ok(ks_two_sample(&a, &b, level)?.with("edge", e).with("tail", x).with("head", y))
        })
        .collect::<CliResult<Vec<TestReport>>>()?;
    out.reports("edge_ks", &reports)?;

    let mut outcome = Outcome::new(Command::TimeReversal);
    for &e in &gated {
        let r = &reports[e];
        let (x, y) = reversed.edge(e);
        outcome.check(&format!("reversed edge {x}->{y}"), r.passed(), format!("two-sample KS D = {:.5}, p = {:.4}", r.statistic, r.p_value));
    }
    let passing = reports.iter().filter(|r| r.passed()).count();
    outcome.record("edges_passing", passing);
    outcome.record("edges", edges);
    outcome.record("focus_vertex", focus);
    Ok(outcome)
}
