//! The product-ratio pair `(Γ_n, S_n)` on the growing segments `{0, …, n}` with
//! `i₀ = 0`, `j₀ = n`: the discrete Matsumoto–Yor chain.
//!
//! Edge variables use the segment layout: `W(i, i+1)` is entry `2i`, `W(i+1, i)` is `2i+1`.

use rand::Rng;
use serde::Serialize;

use super::GammaField;
use crate::error::{Result, WalkError};
use crate::special::GammaLaw;
use crate::stats::{binned_conditional_test, chi_square_homogeneity, chi_square_sf, BinReference, BinnedReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MyPoint {
    pub gamma: f64,
    pub s: f64,
}

fn right(w: &GammaField, i: usize) -> f64 {
    w.get(2 * i)
}

fn left(w: &GammaField, i: usize) -> f64 {
    // W(i, i−1)
    w.get(2 * (i - 1) + 1)
}

fn length(w: &GammaField) -> Result<usize> {
    if w.is_empty() || w.len() % 2 != 0 {
        return Err(WalkError::Structural(format!("{} edge variables do not describe a segment", w.len())));
    }
    Ok(w.len() / 2)
}

/// Closed forms for `k = 1..=n`, with `ρ(i) = W(i,i−1)/W(i,i+1)`:
/// `Γ_k = √(W(0,1) W(k,k−1)) ∏_{i<k} √ρ(i) / Σ_{m<k} ∏_{i≤m} ρ(i)` and
/// `e^{S_k} = √(W(0,1) / W(k,k−1)) ∏_{i<k} ρ(i)^{-1/2}`, i.e. `e^{2S_k} = H₊/H₋`.
pub fn my_chain(w: &GammaField) -> Result<Vec<MyPoint>> {
    let n = length(w)?;
    let ln_w01 = right(w, 0).ln();
    let mut out = Vec::with_capacity(n);
    // partial sums L_m = Σ_{i≤m} ln ρ(i), and log Σ_{m<k} e^{L_m}
    let mut l_prev = 0.0;
    let mut ln_sum = 0.0;
    for k in 1..=n {
        if k > 1 {
            let i = k - 1;
            l_prev += (left(w, i) / right(w, i)).ln();
            let (a, b) = if ln_sum > l_prev { (ln_sum, l_prev) } else { (l_prev, ln_sum) };
            ln_sum = a + (b - a).exp().ln_1p();
        }
        let ln_wk = left(w, k).ln();
        let gamma = (0.5 * (ln_w01 + ln_wk) + 0.5 * l_prev - ln_sum).exp();
        let s = 0.5 * (ln_w01 - ln_wk) - 0.5 * l_prev;
        out.push(MyPoint { gamma, s });
    }
    Ok(out)
}

/// `Γ_{k+1} = Γ_k √(W(k,k+1) W(k+1,k)) / (W(k,k+1) + Γ_k e^{−S_k})` from
/// `Γ_1 = √(W(0,1) W(1,0))`, with `S_{k+1} = S_k + ½ ln(W(k,k+1)/W(k+1,k))`.
pub fn my_chain_recursive(w: &GammaField) -> Result<Vec<MyPoint>> {
    let n = length(w)?;
    let mut gamma = (right(w, 0) * left(w, 1)).sqrt();
    let mut s = 0.5 * (right(w, 0) / left(w, 1)).ln();
    let mut out = vec![MyPoint { gamma, s }];
    for k in 1..n {
        let (r, l) = (right(w, k), left(w, k + 1));
        gamma = gamma * (r * l).sqrt() / (r + gamma * (-s).exp());
        s += 0.5 * (r / l).ln();
        out.push(MyPoint { gamma, s });
    }
    Ok(out)
}

/// Edge variables `W(i,i+1) ~ Γ(α)`, `W(i+1,i) ~ Γ(β)` on `{0, …, n}` and the chain they give.
pub fn sample_my_chain<R: Rng + ?Sized>(alpha: f64, beta: f64, n: usize, rng: &mut R) -> Result<(GammaField, Vec<MyPoint>)> {
    if n == 0 {
        return Err(WalkError::Parameter("segment length must be at least 1".into()));
    }
    let (ra, rb) = (GammaLaw::new(alpha)?, GammaLaw::new(beta)?);
    let w = GammaField::new((0..n).flat_map(|_| [ra.sample(rng), rb.sample(rng)]).collect())?;
    let chain = my_chain(&w)?;
    Ok((w, chain))
}

/// Binned conditional test of `S_n` given `Γ_n` against `GigLaw(α − β, 2Γ_n)`.
#[allow(clippy::too_many_arguments)]
pub fn my_conditional_test<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    n: usize,
    samples: usize,
    bins: usize,
    level: f64,
    reference: BinReference,
    rng: &mut R,
) -> Result<BinnedReport> {
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (_, chain) = sample_my_chain(alpha, beta, n, rng)?;
        let last = chain[n - 1];
        pairs.push((last.gamma, last.s));
    }
    binned_conditional_test(&pairs, alpha - beta, bins, level, reference)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub level: f64,
    pub bins: usize,
    pub passed: bool,
}

fn category(sorted: &[f64], x: f64, parts: usize) -> usize {
    let rank = sorted.partition_point(|&v| v < x);
    (rank * parts / sorted.len()).min(parts - 1)
}

/// Homogeneity of the law of `Γ_{n+1}` across `strata` groups of `Γ_{n−1}` inside each
/// of `bins` equal-count bins of `Γ_n`; per-bin chi-square statistics are summed.
/// Input triples are `(Γ_{n−1}, Γ_n, Γ_{n+1})`.
pub fn my_markov_test(triples: &[(f64, f64, f64)], bins: usize, strata: usize, categories: usize, level: f64) -> Result<MarkovReport> {
    if bins == 0 || strata < 2 || categories < 2 {
        return Err(WalkError::Parameter("need at least one bin, two strata and two categories".into()));
    }
    let mut sorted = triples.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    // Outer percentiles of Γ_n span too wide a range for a bin to condition on.
    let cut = sorted.len() / 100;
    let sorted = &sorted[cut..sorted.len() - cut];
    let m = sorted.len();
    let (mut statistic, mut dof) = (0.0, 0);
    for b in 0..bins {
        let chunk = &sorted[b * m / bins..(b + 1) * m / bins];
        if chunk.len() < strata * categories * 5 {
            continue;
        }
        let mut before: Vec<f64> = chunk.iter().map(|t| t.0).collect();
        let mut after: Vec<f64> = chunk.iter().map(|t| t.2).collect();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        let mut table = vec![vec![0.0; categories]; strata];
        for t in chunk {
            table[category(&before, t.0, strata)][category(&after, t.2, categories)] += 1.0;
        }
        let r = chi_square_homogeneity(&table)?;
        statistic += r.statistic;
        dof += r.dof;
    }
    if dof == 0 {
        return Err(WalkError::Precondition("too few samples for the Markov homogeneity test".into()));
    }
    let p_value = chi_square_sf(statistic, dof);
    Ok(MarkovReport { statistic, dof, p_value, level, bins, passed: p_value > level })
}
