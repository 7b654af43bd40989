//! One line per acceptance criterion. Statistical criteria run the shipped configs
//! through the experiment commands; exact criteria call the library directly.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use rand::Rng;
use walklab_cli::commands::my::recursion_errors;
use walklab_cli::commands::selftest::gambler_ruin_gap;
use walklab_cli::{run, CliResult, Command, ExperimentConfig, Outcome, Pool, RunOptions};
use walklab_core::graph::{build_random_strongly_connected, build_segment, segment_weights, EdgeWeights};
use walklab_core::identity::{check_interpretation, identity_divergence, mix_environment, sample_my_chain, sample_u_field_segment, GammaField, UField};
use walklab_core::linalg::Matrix;
use walklab_core::markov::{green_matrix, hitting_prob, invariant_measure, restricted_kernel, Environment};
use walklab_core::special::GammaLaw;
use walklab_core::stats::{ks_one_sample, rearrangement_check, DiscreteLaw, EmpiricalDistribution};
use walklab_core::tol::{rel_diff, IDENTITY_REL, RESIDUAL};

type Verdict = (bool, String);

fn shipped(command: Command, file: &str) -> CliResult<Outcome> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let config = ExperimentConfig::load(&root.join(file))?;
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(file.trim_end_matches(".toml"));
    run(command, config, &RunOptions { out: Some(out), ..Default::default() })
}

/// Conjunction of the checks whose names `pick` accepts; at least one must exist.
fn gather(o: &Outcome, pick: impl Fn(&str) -> bool) -> Verdict {
    let chosen: Vec<_> = o.checks.iter().filter(|c| pick(&c.name)).collect();
    let passed = !chosen.is_empty() && chosen.iter().all(|c| c.passed);
    let detail = chosen.iter().map(|c| format!("{}: {} ({})", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail)).collect::<Vec<_>>().join("; ");
    (passed, detail)
}

fn named<'a>(names: &'a [&'a str]) -> impl Fn(&str) -> bool + 'a {
    move |n| names.contains(&n)
}

fn criterion_1() -> CliResult<Verdict> {
    let o = shipped(Command::VerifyIdentity, "identity_two_cycle.toml")?;
    let (ok, detail) = gather(&o, named(&["conditional law"]));
    Ok((ok && o.wall_seconds < 60.0, format!("{detail}; {:.1} s", o.wall_seconds)))
}

fn criterion_2() -> CliResult<Verdict> {
    let o = shipped(Command::VerifyIdentity, "identity_torus.toml")?;
    let (ok, detail) = gather(&o, named(&["S vs -S", "H+ vs H-", "conditional law"]));
    Ok((ok && o.checks.len() == 3 && o.wall_seconds < 600.0, format!("{detail}; {:.1} s", o.wall_seconds)))
}

fn criterion_3() -> CliResult<Verdict> {
    let o = shipped(Command::VerifyIdentity, "identity_segment.toml")?;
    let gamma = o.results["marked"]["gamma"].as_f64().unwrap_or(f64::NAN);
    let (ok, detail) = gather(&o, named(&["conditional law"]));
    Ok((ok && (gamma - 1.0).abs() < 1e-12, format!("γ = {gamma}; {detail}")))
}

fn criterion_4(pool: &Pool) -> CliResult<Verdict> {
    let errors = pool.run(0, 1000, |_, rng| recursion_errors(&sample_my_chain(2.0, 1.0, 50, rng)?.0))?;
    let recursion = errors.iter().map(|e| e.0).fold(0.0, f64::max);
    let solve = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok((recursion < IDENTITY_REL && solve < RESIDUAL, format!("1000 fields, n = 50: recursion {recursion:.2e}, linear solve {solve:.2e}")))
}

fn criterion_5() -> CliResult<Verdict> {
    let o = shipped(Command::MatsumotoYor, "matsumoto_yor.toml")?;
    Ok(gather(&o, named(&["conditional law", "Markov homogeneity"])))
}

fn criterion_6(pool: &Pool) -> CliResult<Verdict> {
    let n = 20;
    let g = Arc::new(build_segment(n)?);
    let alpha = segment_weights(n, 2.0, 1.0)?;
    let gamma = identity_divergence(&g, &alpha, 0, n)?;
    let draws = pool.run(1 << 32, 100_000, |_, rng| {
        let w = GammaField::sample(&alpha, rng)?;
        let u = sample_u_field_segment(&g, &w, gamma, rng)?;
        let mixed = mix_environment(&g, &w, &u)?;
        Ok((mixed.w_u.as_slice().to_vec(), mixed.beta))
    })?;
    let level = 0.001;
    let column = |pick: &dyn Fn(&(Vec<f64>, Vec<f64>)) -> f64| EmpiricalDistribution::new(draws.iter().map(pick).collect());
    let (mut edges_ok, mut worst_edge) = (0, 1.0f64);
    for e in 0..g.edge_count() {
        let law = GammaLaw::new(alpha.get(e))?;
        let r = ks_one_sample(&column(&|d| d.0[e])?, |x| law.cdf(x), level)?;
        edges_ok += r.passed() as usize;
        worst_edge = worst_edge.min(r.p_value);
    }
    let (mut vertices_ok, mut worst_vertex) = (0, 1.0f64);
    for v in 0..g.vertex_count() {
        let law = GammaLaw::new(alpha.vertex_weight(&g, v))?;
        let r = ks_one_sample(&column(&|d| d.1[v])?, |x| law.cdf(x), level)?;
        vertices_ok += r.passed() as usize;
        worst_vertex = worst_vertex.min(r.p_value);
    }
    let passed = edges_ok == g.edge_count() && vertices_ok == g.vertex_count();
    Ok((
        passed,
        format!(
            "W^U: {edges_ok}/{} edges pass, min p = {worst_edge:.4}; β: {vertices_ok}/{} vertices pass, min p = {worst_vertex:.4}",
            g.edge_count(),
            g.vertex_count()
        ),
    ))
}

fn criterion_7(pool: &Pool) -> CliResult<Verdict> {
    let reports = pool.run(2 << 32, 100, |_, rng| {
        let n = rng.random_range(2..=12);
        let g = Arc::new(build_random_strongly_connected(n, rng.random_range(0..=2 * n), rng)?);
        let alpha = EdgeWeights::new((0..g.edge_count()).map(|_| rng.random_range(0.2..3.0)).collect())?;
        let w = GammaField::sample(&alpha, rng)?;
        let i0 = rng.random_range(0..n);
        let j0 = (i0 + rng.random_range(1..n)) % n;
        let u = UField::new((0..n).map(|_| rng.random_range(-2.0..2.0)).collect(), i0)?;
        Ok(check_interpretation(&g, &w, &u, i0, j0)?)
    })?;
    let agree = reports.iter().filter(|r| r.agrees()).count();
    let worst = reports.iter().map(|r| r.max_discrepancy).fold(0.0, f64::max);
    Ok((agree == reports.len(), format!("{agree}/{} graphs agree, max relative discrepancy {worst:.2e}", reports.len())))
}

fn criterion_8(pool: &Pool) -> CliResult<Verdict> {
    let ruin = pool.run(3 << 32, 20, |r, rng| gambler_ruin_gap(2 + (r as usize % 30), rng))?.into_iter().fold(0.0, f64::max);
    let chains = pool.run(4 << 32, 100, |_, rng| {
        let n = rng.random_range(2..=12);
        let g = Arc::new(build_random_strongly_connected(n, rng.random_range(0..=2 * n), rng)?);
        let alpha = EdgeWeights::new(vec![1.0; g.edge_count()])?;
        let env = Environment::sample_dirichlet(g, &alpha, rng)?;
        let pi = invariant_measure(&env)?;
        let (i, j) = (0, 1 + rng.random_range(0..n - 1));
        let ratio = rel_diff(pi.pi[j] / pi.pi[i], hitting_prob(&env, i, j)? / hitting_prob(&env, j, i)?);
        // Green function of the walk killed on hitting vertex 0
        let subset: Vec<usize> = (1..n).collect();
        let green = green_matrix(&env, &subset)?;
        let q = restricted_kernel(&env, &subset);
        let mut free = Matrix::identity(subset.len());
        for a in 0..subset.len() {
            for b in 0..subset.len() {
                free[(a, b)] -= q[(a, b)];
            }
        }
        let inverse = green.mul(&free).max_abs_diff(&Matrix::identity(subset.len()));
        Ok([pi.residual, ratio, inverse])
    })?;
    let worst = |k: usize| chains.iter().map(|c| c[k]).fold(0.0, f64::max);
    let (invariance, ratio, inverse) = (worst(0), worst(1), worst(2));
    Ok((
        ruin < RESIDUAL && invariance < RESIDUAL && ratio < IDENTITY_REL && inverse < IDENTITY_REL,
        format!("gambler's ruin {ruin:.2e}; πP − π {invariance:.2e}; π ratio vs hitting ratio {ratio:.2e}; Green inverse {inverse:.2e}"),
    ))
}

fn criterion_9() -> CliResult<Verdict> {
    let o = shipped(Command::Selftest, "selftest.toml")?;
    Ok(gather(&o, |_| true))
}

fn criterion_10() -> CliResult<Verdict> {
    let o = shipped(Command::TimeReversal, "time_reversal.toml")?;
    Ok(gather(&o, |n| n.starts_with("reversed edge")))
}

fn criterion_11() -> CliResult<Verdict> {
    let o = shipped(Command::Cemetery, "cemetery.toml")?;
    Ok(gather(&o, |n| n.starts_with("geometric visits") || n.starts_with("E[β_∂ω(∂,0)]")))
}

/// Every ordered choice of `k` subsets of size `size` from `0..universe`.
fn subset_tuples(universe: usize, size: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let subsets: Vec<Vec<usize>> =
        (0u32..1 << universe).filter(|m| m.count_ones() as usize == size).map(|m| (0..universe).filter(|&i| m >> i & 1 == 1).collect()).collect();
    let mut tuples = vec![Vec::new()];
    for _ in 0..k {
        tuples = tuples.into_iter().flat_map(|t: Vec<Vec<usize>>| subsets.iter().map(move |s| [t.clone(), vec![s.clone()]].concat())).collect();
    }
    tuples
}

fn criterion_12() -> CliResult<Verdict> {
    let laws = [DiscreteLaw::new(vec![0.1, 1.1], vec![0.7, 0.3])?, DiscreteLaw::new(vec![0.2, 0.5, 0.9], vec![0.25, 0.5, 0.25])?];
    let universe = 5;
    let (mut cases, mut bad) = (0, Vec::new());
    for (l, law) in laws.iter().enumerate() {
        for k in 1..=3 {
            for size in 1..=3 {
                for tuple in subset_tuples(universe, size, k) {
                    let r = rearrangement_check(law, universe, &tuple)?;
                    let equal = rel_diff(r.lhs, r.rhs) <= 1e-12;
                    cases += 1;
                    if !r.holds || equal != r.subsets_coincide {
                        bad.push(format!("law {l}, {tuple:?}: {} vs {}", r.lhs, r.rhs));
                    }
                }
            }
        }
    }
    Ok((bad.is_empty(), format!("{cases} configurations, {} violations {}", bad.len(), bad.iter().take(3).cloned().collect::<Vec<_>>().join(", "))))
}

fn criterion_13() -> CliResult<Verdict> {
    let o = shipped(Command::TorusRatio, "torus_ratio.toml")?;
    Ok(gather(&o, |_| true))
}

fn main() -> ExitCode {
    let pool = Pool::new(20240120, std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let criteria: Vec<(&str, Box<dyn Fn() -> CliResult<Verdict> + '_>)> = vec![
        ("product-ratio identity, two-cycle", Box::new(criterion_1)),
        ("product-ratio identity, torus T_2", Box::new(criterion_2)),
        ("product-ratio identity, segment with drift", Box::new(criterion_3)),
        ("Matsumoto-Yor recursion", Box::new(|| criterion_4(&pool))),
        ("Matsumoto-Yor conditional law and Markov property", Box::new(criterion_5)),
        ("mixing property", Box::new(|| criterion_6(&pool))),
        ("interpretation identity", Box::new(|| criterion_7(&pool))),
        ("exact solvers", Box::new(|| criterion_8(&pool))),
        ("special functions", Box::new(criterion_9)),
        ("time reversal", Box::new(criterion_10)),
        ("cemetery torus", Box::new(criterion_11)),
        ("rearrangement inequality", Box::new(criterion_12)),
        ("Γ trend on the torus", Box::new(criterion_13)),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failures += !passed as usize;
        println!("criterion {:>2} {}: {name} [{:.1} s] {detail}", k + 1, if passed { "PASS" } else { "FAIL" }, started.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
