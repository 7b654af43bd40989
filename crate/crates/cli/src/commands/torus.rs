//! `torus-ratio`: invariant-measure ratios against hitting-probability ratios on
//! `T_N`, and the distribution of `Γ` as the marked vertices move apart.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use walklab_core::graph::{build_torus, EdgeWeights, Torus};
use walklab_core::markov::{Environment, RootedSolver};
use walklab_core::special::GammaLaw;
use walklab_core::stats::{spearman, EmpiricalDistribution, RankCorrelation};
use walklab_core::tol::{rel_diff, IDENTITY_REL};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

/// Thresholds at which `P(Γ < δ)` is reported.
const DELTAS: [f64; 4] = [0.05, 0.1, 0.25, 0.5];

#[derive(Debug, Clone, Copy)]
struct Draw {
    distance: usize,
    h_plus: f64,
    h_minus: f64,
    ratio_hitting: f64,
    ratio_invariant: f64,
}

impl Draw {
    fn gamma(&self) -> f64 {
        (self.h_plus * self.h_minus).sqrt()
    }

    fn s(&self) -> f64 {
        0.5 * (self.h_plus / self.h_minus).ln()
    }
}

#[derive(Debug, Clone, Serialize)]
struct DistanceSummary {
    size: usize,
    distance: usize,
    median_gamma: f64,
    below: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
struct SizeSummary {
    size: usize,
    environments: usize,
    max_route_gap: f64,
    trend: Option<RankCorrelation>,
    distances: Vec<DistanceSummary>,
}

/// One environment on `T_N` with `i₀` at the origin: fresh `β` at `i₀` and at every
/// `j₀ = (d, 0)`, one banded factorization for all distances.
fn draw_environment<R: Rng + ?Sized>(
    torus: &Torus,
    graph: &Arc<walklab_core::graph::DirectedGraph>,
    alpha: &EdgeWeights,
    distances: &[usize],
    rng: &mut R,
) -> CliResult<Vec<Draw>> {
    let env = Environment::sample_dirichlet(graph.clone(), alpha, rng)?;
    let root = torus.vertex([0, 0]);
    let beta_law = GammaLaw::new(alpha.vertex_weight(graph, root))?;
    let beta_root = beta_law.sample(rng);
    let (order, band) = torus.folded_order(Some(root));
    let solver = RootedSolver::banded(&env, root, order, band)?;
    let (pinned, _) = solver.pinned_invariant()?;
    distances
        .iter()
        .map(|&d| {
            let j0 = torus.vertex([d as i32, 0]);
            let beta_j = beta_law.sample(rng);
            let (up, down) = solver.escape_pair(j0)?;
            Ok(Draw { distance: d, h_plus: beta_root * up, h_minus: beta_j * down, ratio_hitting: up / down, ratio_invariant: pinned[j0] })
        })
        .collect()
}

/// Dense-solver cross-check on one environment: banded and dense escape pairs agree
/// and re-rooting at `j₀` inverts the ratio. Returns the largest relative gap.
fn dense_gap<R: Rng + ?Sized>(
    torus: &Torus,
    graph: &Arc<walklab_core::graph::DirectedGraph>,
    alpha: &EdgeWeights,
    distances: &[usize],
    rng: &mut R,
) -> CliResult<f64> {
    let env = Environment::sample_dirichlet(graph.clone(), alpha, rng)?;
    let root = torus.vertex([0, 0]);
    let (order, band) = torus.folded_order(Some(root));
    let banded = RootedSolver::banded(&env, root, order, band)?;
    let dense = RootedSolver::dense(&env, root)?;
    let mut gap: f64 = 0.0;
    for &d in distances {
        let j0 = torus.vertex([d as i32, 0]);
        let (bu, bd) = banded.escape_pair(j0)?;
        let (du, dd) = dense.escape_pair(j0)?;
        let (su, sd) = RootedSolver::dense(&env, j0)?.escape_pair(root)?;
        gap = gap.max(rel_diff(bu, du)).max(rel_diff(bd, dd)).max(rel_diff(su / sd, dd / du));
    }
    Ok(gap)
}

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let sizes = config.sizes.clone().unwrap_or_else(|| vec![16]);
    let distances = config.distances.clone().unwrap_or_else(|| vec![1, 2, 4, 8]);
    let alpha_dirs = config.torus_alpha();
    let environments = config.statistical_samples(1000)?;
    let dense_checks = config.dense_checks.unwrap_or(2);
    let level = config.level.unwrap_or(0.05);
    if distances.is_empty() || distances.windows(2).any(|w| w[0] >= w[1]) || distances[0] == 0 {
        return Err(CliError::Config("distances must be positive and strictly increasing".into()));
    }
    let mut outcome = Outcome::new(Command::TorusRatio);
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut worst_route: f64 = 0.0;
    let mut worst_dense: f64 = 0.0;
    let mut trends_ok = true;
    let mut trend_detail = Vec::new();
    for (k, &size) in sizes.iter().enumerate() {
        if distances[distances.len() - 1] > size {
            return Err(CliError::Config(format!("distance {} does not fit on T_{size}", distances[distances.len() - 1])));
        }
        let torus = Torus::new(size);
        let (g, alpha) = build_torus(size, alpha_dirs)?;
        let graph = Arc::new(g);
        // disjoint stream ranges per size
        let offset = (k as u64) << 40;
        let draws = pool.run(offset, environments, |_, rng| draw_environment(&torus, &graph, &alpha, &distances, rng))?;
        let gaps = pool.run(offset + (1 << 39), dense_checks, |_, rng| dense_gap(&torus, &graph, &alpha, &distances, rng))?;
        worst_dense = gaps.iter().fold(worst_dense, |a, &b| a.max(b));

        let mut max_route: f64 = 0.0;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (r, env_draws) in draws.iter().enumerate() {
            for d in env_draws {
                max_route = max_route.max(rel_diff(d.ratio_hitting, d.ratio_invariant));
                xs.push(d.distance as f64);
                ys.push(d.gamma());
                rows.push(vec![
                    r.to_string(),
                    size.to_string(),
                    d.distance.to_string(),
                    num(d.gamma()),
                    num(d.s()),
                    num(d.h_plus),
                    num(d.h_minus),
                    num(d.ratio_hitting),
                    num(d.ratio_invariant),
                ]);
            }
        }
        worst_route = worst_route.max(max_route);
        let per_distance: Vec<DistanceSummary> = distances
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let gam = EmpiricalDistribution::new(draws.iter().map(|e| e[i].gamma()).collect())?;
                let below = DELTAS.iter().map(|&t| (t, gam.ecdf(t))).collect();
                Ok(DistanceSummary { size, distance: d, median_gamma: gam.median(), below })
            })
            .collect::<CliResult<_>>()?;
        let trend = if distances.len() >= 2 { Some(spearman(&xs, &ys)?) } else { None };
        if let Some(t) = &trend {
            let decreasing = per_distance.windows(2).all(|w| w[1].median_gamma < w[0].median_gamma);
            let ok = decreasing && t.rho < 0.0 && t.p_value < level;
            trends_ok &= ok;
            let medians: Vec<String> = per_distance.iter().map(|s| format!("{:.4}", s.median_gamma)).collect();
            trend_detail.push(format!("N={size}: medians [{}], Spearman ρ = {:.4}, p = {:.2e}", medians.join(", "), t.rho, t.p_value));
        }
        summaries.push(SizeSummary { size, environments, max_route_gap: max_route, trend, distances: per_distance });
    }
    out.batches("torus", &["environment", "size", "distance", "gamma", "s", "h_plus", "h_minus", "ratio_hitting", "ratio_invariant"], &rows)?;
    let table: Vec<Vec<String>> = summaries
        .iter()
        .flat_map(|s| s.distances.iter())
        .map(|d| {
            let mut row = vec![d.size.to_string(), d.distance.to_string(), num(d.median_gamma)];
            row.extend(d.below.iter().map(|b| num(b.1)));
            row
        })
        .collect();
    out.table("median_gamma", &["size", "distance", "median_gamma", "p_below_0.05", "p_below_0.1", "p_below_0.25", "p_below_0.5"], &table)?;

    outcome.check("ratio routes", worst_route < IDENTITY_REL, format!("π(j0)/π(i0) vs hitting ratio, max relative gap {worst_route:.2e}"));
    outcome.check(
        "dense solver",
        worst_dense < IDENTITY_REL,
        format!("banded vs dense and i0↔j0 swap, max relative gap {worst_dense:.2e} over {dense_checks} environments per size"),
    );
    if !trend_detail.is_empty() {
        outcome.check("Γ decreases with distance", trends_ok, trend_detail.join("; "));
    }
    outcome.record("sizes", &summaries);
    Ok(outcome)
}
