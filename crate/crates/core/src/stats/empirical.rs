use crate::error::{Result, WalkError};

/// Sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(WalkError::Parameter(format!("sample value {i} is NaN")));
        }
        values.sort_by(f64::total_cmp);
        Self::from_sorted(values)
    }

    /// Takes an already sorted sample; unsorted or NaN input is rejected.
    pub fn from_sorted(sorted: Vec<f64>) -> Result<Self> {
        if sorted.is_empty() {
            return Err(WalkError::Parameter("empty sample".into()));
        }
        if sorted.iter().any(|v| v.is_nan()) {
            return Err(WalkError::Parameter("sample contains NaN".into()));
        }
        if let Some(i) = sorted.windows(2).position(|w| w[0] > w[1]) {
            return Err(WalkError::Parameter(format!("sample not sorted at position {i}")));
        }
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample `≤ x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// Type-7 (linear interpolation) quantile.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let h = (self.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(self.len() - 1);
        self.sorted[lo] + (h - lo as f64) * (self.sorted[hi] - self.sorted[lo])
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_queries() {
        let e = EmpiricalDistribution::new(vec![3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(e.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.ecdf(2.5), 0.5);
        assert_eq!(e.ecdf(0.0), 0.0);
        assert_eq!(e.median(), 2.5);
        assert_eq!(e.quantile(1.0), 4.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(EmpiricalDistribution::new(vec![]).is_err());
        assert!(EmpiricalDistribution::new(vec![1.0, f64::NAN]).is_err());
        assert!(EmpiricalDistribution::from_sorted(vec![2.0, 1.0]).is_err());
    }
}
