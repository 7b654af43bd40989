use serde::Serialize;

use crate::error::{Result, WalkError};

/// Finitely supported law of a nonnegative variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.len() != probs.len() || values.is_empty() {
            return Err(WalkError::Parameter("law needs matching non-empty values and probabilities".into()));
        }
        if values.iter().any(|&v| !(v >= 0.0 && v.is_finite())) || probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(WalkError::Parameter("values must be nonnegative and probabilities nonnegative".into()));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(WalkError::Parameter("probabilities must sum to one".into()));
        }
        Ok(Self { values, probs })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn moment(&self, k: usize) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| p * v.powi(k as i32)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RearrangementReport {
    /// `E[∏_p ∏_{i ∈ I_p} Π_i]`.
    pub lhs: f64,
    /// `E[Π^k]^N`.
    pub rhs: f64,
    pub holds: bool,
    pub subsets_coincide: bool,
}

/// Compares `E[∏_p ∏_{i∈I_p} Π_i]`, for i.i.d. coordinates `Π_i` with law `law`, with
/// `E[Π^k]^N` where `k` is the number of subsets and `N` their common size.
pub fn rearrangement_check(law: &DiscreteLaw, universe: usize, subsets: &[Vec<usize>]) -> Result<RearrangementReport> {
    let k = subsets.len();
    if k == 0 {
        return Err(WalkError::Parameter("need at least one subset".into()));
    }
    let size = subsets[0].len();
    let mut multiplicity = vec![0usize; universe];
    for (p, s) in subsets.iter().enumerate() {
        if s.len() != size {
            return Err(WalkError::Parameter(format!("subset {p} has {} elements, expected {size}", s.len())));
        }
        let mut seen = vec![false; universe];
        for &i in s {
            if i >= universe || seen[i] {
                return Err(WalkError::Parameter(format!("subset {p} has an invalid or repeated element {i}")));
            }
            seen[i] = true;
            multiplicity[i] += 1;
        }
    }
    // coordinates are independent, so the expectation factorizes into moments
    let lhs = multiplicity.iter().filter(|&&m| m > 0).fold(1.0, |acc, &m| acc * law.moment(m));
    let top = law.moment(k);
    let rhs = (0..size).fold(1.0, |acc, _| acc * top);
    let sorted = |s: &Vec<usize>| {
        let mut t = s.clone();
        t.sort_unstable();
        t
    };
    let first = sorted(&subsets[0]);
    let subsets_coincide = subsets.iter().all(|s| sorted(s) == first);
    Ok(RearrangementReport { lhs, rhs, holds: lhs <= rhs + 1e-12, subsets_coincide })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli_law() -> DiscreteLaw {
        DiscreteLaw::new(vec![0.1, 1.1], vec![0.7, 0.3]).unwrap()
    }

    /// Expectation by summing over every joint outcome of the coordinates.
    fn brute_force(law: &DiscreteLaw, universe: usize, subsets: &[Vec<usize>]) -> f64 {
        let m = law.values().len();
        let mut total = 0.0;
        for code in 0..m.pow(universe as u32) {
            let mut c = code;
            let mut prob = 1.0;
            let mut x = vec![0.0; universe];
            for xi in x.iter_mut() {
                prob *= law.probs()[c % m];
                *xi = law.values()[c % m];
                c /= m;
            }
            total += prob * subsets.iter().map(|s| s.iter().map(|&i| x[i]).product::<f64>()).product::<f64>();
        }
        total
    }

    #[test]
    fn cauchy_schwarz_case() {
        let law = bernoulli_law();
        let r = rearrangement_check(&law, 5, &[vec![1], vec![2]]).unwrap();
        assert!((r.lhs - law.moment(1).powi(2)).abs() < 1e-15);
        assert!((r.rhs - law.moment(2)).abs() < 1e-15);
        assert!(r.holds && !r.subsets_coincide);
    }

    #[test]
    fn factorized_expectation_matches_joint_sum() {
        let law = bernoulli_law();
        for subsets in [vec![vec![0, 1], vec![1, 2], vec![3, 4]], vec![vec![0, 2, 4], vec![4, 2, 0]]] {
            let r = rearrangement_check(&law, 5, &subsets).unwrap();
            assert!((r.lhs - brute_force(&law, 5, &subsets)).abs() < 1e-14);
        }
    }

    #[test]
    fn equality_when_identical() {
        let r = rearrangement_check(&bernoulli_law(), 5, &[vec![0, 3], vec![3, 0], vec![0, 3]]).unwrap();
        assert!(r.subsets_coincide);
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn rejects_mismatched_sizes() {
        assert!(rearrangement_check(&bernoulli_law(), 5, &[vec![0], vec![1, 2]]).is_err());
        assert!(rearrangement_check(&bernoulli_law(), 5, &[vec![0, 0]]).is_err());
        assert!(rearrangement_check(&bernoulli_law(), 5, &[vec![7]]).is_err());
    }
}
