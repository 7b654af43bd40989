use super::{EmpiricalDistribution, TestReport};
use crate::error::{Result, WalkError};

pub const KS_MIN_SAMPLE: usize = 20;

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // theta-function form converges fast for small λ
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the finite-sample correction of the argument.
fn p_value(d: f64, n_eff: f64) -> f64 {
    let root = n_eff.sqrt();
    kolmogorov_sf((root + 0.12 + 0.11 / root) * d)
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &EmpiricalDistribution, cdf: F, level: f64) -> Result<TestReport> {
    let n = sample.len();
    if n < KS_MIN_SAMPLE {
        return Err(WalkError::Precondition(format!("KS test needs at least {KS_MIN_SAMPLE} values, got {n}")));
    }
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.values().iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    Ok(TestReport::new("ks_one_sample", d, p_value(d, nf), level, vec![n]))
}

pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution, level: f64) -> Result<TestReport> {
    let (n, m) = (a.len(), b.len());
    if n.min(m) < KS_MIN_SAMPLE {
        return Err(WalkError::Precondition(format!("two-sample KS test needs at least {KS_MIN_SAMPLE} values per sample, got {n} and {m}")));
    }
    let (xa, xb) = (a.values(), b.values());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xa[i].min(xb[j]);
        while i < n && xa[i] <= x {
            i += 1;
        }
        while j < m && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n * m) as f64 / (n + m) as f64;
    Ok(TestReport::new("ks_two_sample", d, p_value(d, n_eff), level, vec![n, m]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kolmogorov_tail_values() {
        // two standard critical values of the limiting law
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
        // both series agree where they meet
        let below = kolmogorov_sf(1.0 - 1e-12);
        let above = kolmogorov_sf(1.0);
        assert!((below - above).abs() < 1e-10);
    }

    #[test]
    fn size_floor() {
        let e = EmpiricalDistribution::new((0..19).map(|i| i as f64 / 19.0).collect()).unwrap();
        assert!(ks_one_sample(&e, |x| x, 0.01).is_err());
        let e = EmpiricalDistribution::new((0..20).map(|i| (i as f64 + 0.5) / 20.0).collect()).unwrap();
        assert!(ks_one_sample(&e, |x| x, 0.01).unwrap().passed());
    }

    #[test]
    fn gross_shift_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = EmpiricalDistribution::new((0..1000).map(|_| rng.random::<f64>() + 5.0).collect()).unwrap();
        assert!(ks_one_sample(&e, |x| x.clamp(0.0, 1.0), 0.01).unwrap().p_value < 1e-6);
    }

    #[test]
    fn two_sample_statistic_by_hand() {
        let a = EmpiricalDistribution::new((0..20).map(|i| i as f64).collect()).unwrap();
        let b = EmpiricalDistribution::new((10..30).map(|i| i as f64).collect()).unwrap();
        let r = ks_two_sample(&a, &b, 0.01).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
        let same = ks_two_sample(&a, &a, 0.01).unwrap();
        assert_eq!(same.statistic, 0.0);
    }
}
