//! Unit-rate gamma and Dirichlet draws.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Result, WalkError};

/// `Γ(shape, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct GammaLaw {
    shape: f64,
    inner: Gamma<f64>,
}

impl GammaLaw {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(WalkError::Domain(format!("gamma shape {shape} must be positive")));
        }
        let inner = Gamma::new(shape, 1.0).map_err(|e| WalkError::Domain(e.to_string()))?;
        Ok(Self { shape, inner })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // the sampler can round to zero for tiny shapes; the smallest positive
        // normal keeps every downstream logarithm finite
        self.inner.sample(rng).max(f64::MIN_POSITIVE)
    }

    /// Regularized lower incomplete gamma, `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            statrs::function::gamma::gamma_lr(self.shape, x)
        }
    }
}

pub fn gamma_sample<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    Ok(GammaLaw::new(shape)?.sample(rng))
}

/// A draw from `D(shapes)`, built by normalizing independent gamma variables.
pub fn dirichlet_sample<R: Rng + ?Sized>(shapes: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if shapes.is_empty() {
        return Err(WalkError::Domain("Dirichlet law needs at least one shape".into()));
    }
    let laws = shapes.iter().map(|&a| GammaLaw::new(a)).collect::<Result<Vec<_>>>()?;
    let mut w: Vec<f64> = laws.iter().map(|l| l.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_shapes() {
        assert!(GammaLaw::new(0.0).is_err());
        assert!(GammaLaw::new(-1.0).is_err());
        assert!(GammaLaw::new(f64::NAN).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(dirichlet_sample(&[1.0, 0.0], &mut rng).is_err());
        assert!(dirichlet_sample(&[], &mut rng).is_err());
    }

    #[test]
    fn dirichlet_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = dirichlet_sample(&[0.1, 1.0, 3.0, 0.5], &mut rng).unwrap();
            assert!(p.iter().all(|&x| x > 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        for shape in [0.3, 1.0, 4.0] {
            let law = GammaLaw::new(shape).unwrap();
            let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            // Var(X) = a, Var((X − a)²) = 2a² + 6a for Γ(a, 1)
            assert!((mean - shape).abs() < 3.0 * (shape / n as f64).sqrt(), "mean {mean} for {shape}");
            let se_var = ((2.0 * shape * shape + 6.0 * shape) / n as f64).sqrt();
            assert!((var - shape).abs() < 3.0 * se_var, "var {var} for {shape}");
        }
    }

    #[test]
    fn dirichlet_means() {
        let shapes = [1.0, 2.0, 0.5, 1.5];
        let total: f64 = shapes.iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut sums = [0.0; 4];
        for _ in 0..n {
            let p = dirichlet_sample(&shapes, &mut rng).unwrap();
            for (s, x) in sums.iter_mut().zip(&p) {
                *s += x;
            }
        }
        for (i, &a) in shapes.iter().enumerate() {
            let m = a / total;
            let var = m * (1.0 - m) / (total + 1.0);
            assert!((sums[i] / n as f64 - m).abs() < 3.0 * (var / n as f64).sqrt());
        }
    }

    #[test]
    fn cdf_matches_exponential() {
        let law = GammaLaw::new(1.0).unwrap();
        for x in [0.1, 1.0, 3.0] {
            assert!((law.cdf(x) - (1.0 - f64::exp(-x))).abs() < 1e-12);
        }
    }
}
