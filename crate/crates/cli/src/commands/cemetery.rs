//! `cemetery`: the torus with a killing vertex `∂` joined to every site by weight-ε edges.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use walklab_core::graph::{build_torus_star, DirectedGraph, EdgeWeights, SpecialVertex, Torus, VertexLabel};
use walklab_core::markov::{hitting_prob, visits_before_hit, Environment, RootedSolver};
use walklab_core::special::GammaLaw;
use walklab_core::stats::{geometric_fit, mean_ci, MeanEstimate, TestReport};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

/// Mean estimates must land within this many standard errors of ε.
const MEAN_Z: f64 = 3.0;

struct Star {
    graph: Arc<DirectedGraph>,
    alpha: EdgeWeights,
    origin: usize,
    cemetery: usize,
    cemetery_to_origin: usize,
    beta_cemetery: GammaLaw,
}

impl Star {
    fn new(size: usize, alpha: [f64; 4], eps: f64) -> CliResult<Self> {
        let (g, a) = build_torus_star(size, alpha, eps)?;
        let origin = Torus::new(size).vertex([0, 0]);
        let cemetery = g.find_label(VertexLabel::Named(SpecialVertex::Cemetery)).ok_or_else(|| CliError::Config("torus has no cemetery".into()))?;
        let cemetery_to_origin = *g.out_edges(cemetery).iter().find(|&&e| g.head(e) == origin).expect("∂ connects to every site");
        let beta_cemetery = GammaLaw::new(a.vertex_weight(&g, cemetery))?;
        Ok(Self { graph: Arc::new(g), alpha: a, origin, cemetery, cemetery_to_origin, beta_cemetery })
    }

    /// `β_∂ ω(∂, 0)` and `π(0)/π̃(∂) = β_∂ π(0)/π(∂)` for one environment.
    fn draw<R: Rng + ?Sized>(&self, with_ratio: bool, rng: &mut R) -> CliResult<(f64, f64)> {
        let env = Environment::sample_dirichlet(self.graph.clone(), &self.alpha, rng)?;
        let beta = self.beta_cemetery.sample(rng);
        let ratio = if with_ratio {
            let (pinned, _) = RootedSolver::dense(&env, self.cemetery)?.pinned_invariant()?;
            beta * pinned[self.origin]
        } else {
            f64::NAN
        };
        Ok((beta * env.edge_prob(self.cemetery_to_origin), ratio))
    }
}

#[derive(Debug, Clone, Serialize)]
struct Moment {
    exponent: f64,
    estimate: MeanEstimate,
}

#[derive(Debug, Clone, Serialize)]
struct Case {
    size: usize,
    epsilon: f64,
    escape_probability: f64,
    geometric: TestReport,
    killing_mean: MeanEstimate,
    moments: Vec<Moment>,
}

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let sizes = config.sizes.clone().unwrap_or_else(|| vec![2, 3, 4]);
    let epsilons = config.epsilon.clone().unwrap_or_else(|| vec![0.5]);
    let exponents = config.exponents.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let alpha = config.torus_alpha();
    let samples = config.statistical_samples(100_000)?;
    let walks = config.positive("walks", config.walks, 100_000)?;
    let fields = config.positive("fields", config.fields, 2000)?;
    let level = config.level()?;
    if sizes.is_empty() || epsilons.is_empty() {
        return Err(CliError::Config("need at least one size and one ε".into()));
    }

    let mut outcome = Outcome::new(Command::Cemetery);
    let mut cases = Vec::new();
    let mut moment_rows = Vec::new();
    let mut walk_rows = Vec::new();
    for (k, &size) in sizes.iter().enumerate() {
        for (m, &eps) in epsilons.iter().enumerate() {
            let star = Star::new(size, alpha, eps)?;
            let base = ((k * 64 + m) as u64) << 40;

            // one fixed environment, many walks in it
            let env = {
                let mut rng = walklab_core::seeding::replicate_rng(pool.seed(), base);
                Environment::sample_dirichlet(star.graph.clone(), &star.alpha, &mut rng)?
            };
            let p = hitting_prob(&env, star.origin, star.cemetery)?;
            let counts = pool.run(base + 1, walks, |_, rng| Ok(visits_before_hit(&env, star.origin, star.cemetery, rng)))?;
            let mut geometric = geometric_fit(&counts, p, level)?;
            geometric.name = format!("geometric N={size} eps={eps}");
            walk_rows.extend(counts.iter().enumerate().map(|(r, c)| vec![size.to_string(), num(eps), r.to_string(), c.to_string()]));

            let killing = pool.run(base + (1 << 36), samples, |_, rng| Ok(star.draw(false, rng)?.0))?;
            let killing_mean = mean_ci(&killing, 0.95)?;

            let ratios = pool.run(base + (2 << 36), fields, |_, rng| Ok(star.draw(true, rng)?.1))?;
            let moments = exponents
                .iter()
                .map(|&a| {
                    let powered: Vec<f64> = ratios.iter().map(|r| r.powf(a)).collect();
                    Ok(Moment { exponent: a, estimate: mean_ci(&powered, 0.95)? })
                })
                .collect::<CliResult<Vec<_>>>()?;
            for mo in &moments {
                moment_rows.push(vec![
                    size.to_string(),
                    num(eps),
                    num(mo.exponent),
                    num(mo.estimate.mean),
                    num(mo.estimate.std_err),
                    num(mo.estimate.lo),
                    num(mo.estimate.hi),
                ]);
            }

            let z = killing_mean.z_score(eps);
            outcome.check(
                &format!("geometric visits N={size} eps={eps}"),
                geometric.passed(),
                format!("chi-square {:.2}, p = {:.4}, P_0(H_∂ < H_0⁺) = {p:.5}, {walks} walks", geometric.statistic, geometric.p_value),
            );
            outcome.check(
                &format!("E[β_∂ω(∂,0)] N={size} eps={eps}"),
                z.abs() <= MEAN_Z,
                format!("mean {:.5} ± {:.5} vs ε = {eps} ({z:+.2} s.e.)", killing_mean.mean, killing_mean.std_err),
            );
            outcome.check(
                &format!("finite moments N={size} eps={eps}"),
                moments.iter().all(|mo| mo.estimate.mean.is_finite() && mo.estimate.mean > 0.0),
                moments.iter().map(|mo| format!("a={}: {:.4}", mo.exponent, mo.estimate.mean)).collect::<Vec<_>>().join(", "),
            );
            cases.push(Case { size, epsilon: eps, escape_probability: p, geometric, killing_mean, moments });
        }
    }
    out.reports("geometric", &cases.iter().map(|c| c.geometric.clone()).collect::<Vec<_>>())?;
    out.batches("visits", &["size", "epsilon", "walk", "visits"], &walk_rows)?;
    out.table("moments", &["size", "epsilon", "exponent", "mean", "std_err", "lo", "hi"], &moment_rows)?;
    outcome.record("cases", &cases);
    Ok(outcome)
}
