//! Browser bindings. Every function returns a flat `Float64Array` so the page
//! can draw it without any glue beyond the generated module.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use walklab_core::graph::{build_torus, Torus};
use walklab_core::identity::sample_my_chain;
use walklab_core::markov::{invariant_measure, Environment};
use walklab_core::special::GigLaw;
use walklab_core::WalkError;
use wasm_bindgen::prelude::*;

fn js(e: WalkError) -> JsError {
    JsError::new(&e.to_string())
}

/// `[lo, hi, density at points…, histogram heights…]` for `S` with order `order` and
/// coefficient `coef`. The grid spans the central mass of the law.
pub fn gig_panel(order: f64, coef: f64, samples: usize, bins: usize, seed: u64) -> Result<Vec<f64>, WalkError> {
    if bins == 0 || samples == 0 {
        return Err(WalkError::Parameter("need at least one bin and one sample".into()));
    }
    let law = GigLaw::new(order, coef)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<f64> = (0..samples).map(|_| law.sample(&mut rng)).collect();
    let cdf = law.cdf_table();
    // quantiles by bisection on the tabulated cdf
    let quantile = |p: f64| {
        let (mut a, mut b) = (law.mode() - 1.0, law.mode() + 1.0);
        while cdf.cdf(a) > p {
            a -= 2.0 * (b - a);
        }
        while cdf.cdf(b) < p {
            b += 2.0 * (b - a);
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if cdf.cdf(m) < p {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let (lo, hi) = (quantile(0.001), quantile(0.999));
    let width = (hi - lo) / bins as f64;
    let mut out = vec![lo, hi];
    out.extend((0..bins).map(|k| law.pdf_s(lo + (k as f64 + 0.5) * width)));
    let mut counts = vec![0.0; bins];
    for s in draws {
        if (lo..hi).contains(&s) {
            counts[(((s - lo) / width) as usize).min(bins - 1)] += 1.0;
        }
    }
    out.extend(counts.iter().map(|c| c / (samples as f64 * width)));
    Ok(out)
}

/// `[Γ₁, S₁, Γ₂, S₂, …]` along one segment of length `n`.
pub fn my_panel(alpha: f64, beta: f64, n: usize, seed: u64) -> Result<Vec<f64>, WalkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, chain) = sample_my_chain(alpha, beta, n, &mut rng)?;
    Ok(chain.iter().flat_map(|p| [p.gamma, p.s]).collect())
}

/// Invariant probability of one Dirichlet environment on the torus of side `2n`,
/// row by row from label `(-n, -n)`.
pub fn torus_panel(n: usize, alpha: [f64; 4], seed: u64) -> Result<Vec<f64>, WalkError> {
    let (g, weights) = build_torus(n, alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = Environment::sample_dirichlet(Arc::new(g), &weights, &mut rng)?;
    let pi = invariant_measure(&env)?.pi;
    let torus = Torus::new(n);
    let side = torus.side() as i32;
    let half = n as i32;
    Ok((0..side).flat_map(|y| (0..side).map(move |x| [x - half, y - half])).map(|p| pi[torus.vertex(p)]).collect())
}

#[wasm_bindgen]
pub fn gig(order: f64, coef: f64, samples: usize, bins: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    gig_panel(order, coef, samples, bins, seed).map_err(js)
}

#[wasm_bindgen]
pub fn matsumoto_yor(alpha: f64, beta: f64, n: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    my_panel(alpha, beta, n, seed).map_err(js)
}

#[wasm_bindgen]
pub fn torus(n: usize, a0: f64, a1: f64, a2: f64, a3: f64, seed: u64) -> Result<Vec<f64>, JsError> {
    torus_panel(n, [a0, a1, a2, a3], seed).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_follows_density() {
        let out = gig_panel(1.0, 2.0, 200_000, 40, 1).unwrap();
        let (lo, hi) = (out[0], out[1]);
        assert!(lo < hi);
        let (density, hist) = out[2..].split_at(40);
        let width = (hi - lo) / 40.0;
        let l1: f64 = density.iter().zip(hist).map(|(d, h)| (d - h).abs() * width).sum();
        assert!(l1 < 0.03, "{l1}");
    }

    #[test]
    fn trajectory_has_one_point_per_site() {
        let out = my_panel(2.0, 1.0, 12, 3).unwrap();
        assert_eq!(out.len(), 24);
        assert!(out.iter().step_by(2).all(|g| *g > 0.0));
        assert!(my_panel(2.0, 1.0, 0, 3).is_err());
    }

    #[test]
    fn torus_measure_is_a_probability() {
        let out = torus_panel(3, [1.0, 2.0, 0.5, 1.5], 4).unwrap();
        assert_eq!(out.len(), 36);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(out.iter().all(|p| *p > 0.0));
    }
}
