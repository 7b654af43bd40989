//! `selftest`: special-function reference values, exact-solver oracles and sampler
//! calibration. `perturbation` scales the reference values to prove the checks bite.

use std::sync::Arc;

use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};
use walklab_core::graph::{build_segment, segment_weights};
use walklab_core::markov::{absorption_prob, gambler_ruin, Environment};
use walklab_core::special::{bessel_k, ln_bessel_k, GigLaw, RouSampler};
use walklab_core::stats::{ks_one_sample, EmpiricalDistribution, TestReport};
use walklab_core::tol::{IDENTITY_REL, RESIDUAL};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, RunOutput};
use crate::pool::Pool;
use crate::{Command, Outcome};

const GOLDEN: &str = include_str!("../../../core/tests/fixtures/bessel_k.txt");
pub const GIG_ORDERS: [f64; 4] = [-2.5, 0.0, 1.0, 5.0];
pub const GIG_COEFS: [f64; 3] = [0.05, 1.0, 20.0];
const GIG_REPS: usize = 20;
const GIG_DRAWS: usize = 2000;
/// Calibration fails when the rejection count exceeds this quantile of its null law.
const CALIBRATION_QUANTILE: f64 = 0.999;

fn golden() -> Vec<(f64, f64, f64)> {
    GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .filter_map(|l| {
            let v: Vec<f64> = l.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            (v.len() == 3).then(|| (v[0], v[1], v[2]))
        })
        .collect()
}

/// Largest relative error of `K_{1/2}(x)` against `√(π/2x) e^{−x}` on `xs`.
pub fn half_order_error(xs: &[f64], perturbation: f64) -> CliResult<f64> {
    xs.iter().try_fold(0.0f64, |worst, &x| {
        let exact = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + perturbation);
        Ok(worst.max((bessel_k(0.5, x)? / exact - 1.0).abs()))
    })
}

/// Largest relative residual of `K_{ν+1}(x) = K_{ν−1}(x) + (2ν/x) K_ν(x)`.
pub fn recurrence_residual() -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for nu in [0.3, 1.0, 2.5, 7.0] {
        for x in [0.1, 1.0, 5.0, 30.0] {
            let lhs = bessel_k(nu + 1.0, x)?;
            let rhs = bessel_k(nu - 1.0, x)? + 2.0 * nu / x * bessel_k(nu, x)?;
            worst = worst.max((lhs - rhs).abs() / lhs);
        }
    }
    Ok(worst)
}

/// Largest `|1 − mass|` of the GIG density over the calibration grid.
pub fn normalization_error() -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for order in GIG_ORDERS {
        for coef in GIG_COEFS {
            worst = worst.max((GigLaw::new(order, coef)?.cdf_table().total_mass() - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Absorbing-chain solve against the gambler's-ruin closed form on a random segment.
pub fn gambler_ruin_gap<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliResult<f64> {
    let g = Arc::new(build_segment(n)?);
    let env = Environment::sample_dirichlet(g, &segment_weights(n, 1.0, 1.0)?, rng)?;
    let mut rho = vec![0.0; n + 1];
    for (i, r) in rho.iter_mut().enumerate().take(n).skip(1) {
        *r = env.edge_prob(2 * (i - 1) + 1) / env.edge_prob(2 * i);
    }
    let (mut a, mut b) = (vec![false; n + 1], vec![false; n + 1]);
    a[0] = true;
    b[n] = true;
    let h = absorption_prob(&env, &a, &b)?;
    (0..=n).try_fold(0.0f64, |worst, x| Ok(worst.max((gambler_ruin(&rho, 0, x, n)? - h[x]).abs())))
}

/// KS calibration of the ratio-of-uniforms sampler: `GIG_REPS` tests of `GIG_DRAWS`
/// draws at every grid point, with the rejection count compared to its binomial law.
pub fn gig_calibration(pool: &Pool, offset: u64, level: f64) -> CliResult<(Vec<TestReport>, usize, u64)> {
    let mut reports = Vec::new();
    for (k, order) in GIG_ORDERS.iter().enumerate() {
        for (m, coef) in GIG_COEFS.iter().enumerate() {
            let table = GigLaw::new(*order, *coef)?.cdf_table();
            let sampler = RouSampler::new(*order, *coef);
            let base = offset + (((k * GIG_COEFS.len() + m) * GIG_REPS) as u64);
            let samples = pool.run(base, GIG_REPS, |_, rng| Ok((0..GIG_DRAWS).map(|_| sampler.sample(rng)).collect::<Vec<f64>>()))?;
            for (rep, s) in samples.into_iter().enumerate() {
                let r = ks_one_sample(&EmpiricalDistribution::new(s)?, |x| table.cdf(x), level)?;
                reports.push(r.with("order", order).with("coef", coef).with("rep", rep));
            }
        }
    }
    let rejections = reports.iter().filter(|r| !r.passed()).count();
    let null = Binomial::new(level, reports.len() as u64).expect("valid binomial");
    let bound = null.inverse_cdf(CALIBRATION_QUANTILE);
    Ok((reports, rejections, bound))
}

pub fn run(config: &ExperimentConfig, pool: &Pool, out: &mut RunOutput) -> CliResult<Outcome> {
    let perturbation = config.perturbation.unwrap_or(0.0);
    let level = config.level()?;
    let mut outcome = Outcome::new(Command::Selftest);

    let mut worst_golden: f64 = 0.0;
    let mut rows = Vec::new();
    for (order, x, ln_k) in golden() {
        let reference = ln_k + perturbation.ln_1p();
        let got = ln_bessel_k(order, x)?;
        worst_golden = worst_golden.max((got - reference).abs());
        rows.push(vec![num(order), num(x), num(reference), num(got)]);
    }
    out.table("bessel_golden", &["order", "x", "ln_k_reference", "ln_k_computed"], &rows)?;
    outcome.check("Bessel K golden values", worst_golden < IDENTITY_REL, format!("{} values, max relative error {worst_golden:.2e}", rows.len()));

    let half = half_order_error(&[0.1, 1.0, 10.0], perturbation)?;
    outcome.check("K_1/2 closed form", half < IDENTITY_REL, format!("max relative error {half:.2e} at x in {{0.1, 1, 10}}"));
    let rec = recurrence_residual()?;
    outcome.check("K recurrence", rec < 1e-8, format!("max relative residual {rec:.2e}"));
    let norm = normalization_error()?;
    outcome.check("GIG normalization", norm < 1e-8, format!("max |1 − mass| {norm:.2e}"));

    let gaps = pool.run(0, 20, |_, rng| gambler_ruin_gap(30, rng))?;
    let gap = gaps.iter().fold(0.0f64, |a, &b| a.max(b)) + perturbation;
    outcome.check("gambler's ruin vs solve", gap < RESIDUAL, format!("max gap {gap:.2e} over 20 segments"));

    let (reports, rejections, bound) = gig_calibration(pool, 1 << 32, level)?;
    out.reports("gig_calibration", &reports)?;
    outcome.check(
        "GIG sampler calibration",
        rejections as u64 <= bound,
        format!("{rejections} of {} KS tests rejected at {level}; null {CALIBRATION_QUANTILE} quantile {bound}", reports.len()),
    );
    Ok(outcome)
}
