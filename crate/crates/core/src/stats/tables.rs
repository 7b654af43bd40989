use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::TestReport;
use crate::error::{Result, WalkError};

const MIN_EXPECTED: f64 = 5.0;

pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return f64::NAN;
    }
    ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(statistic.max(0.0))
}

/// Pearson chi-square fit of counts on `{1, 2, …}` to the geometric law
/// `P(k) = (1 − p)^{k−1} p`; cells are merged until every expectation is at least 5.
pub fn geometric_fit(counts: &[u64], p: f64, level: f64) -> Result<TestReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(WalkError::Parameter(format!("geometric parameter {p} outside (0, 1]")));
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(WalkError::Parameter(format!("count {i} is zero; the support starts at 1")));
    }
    let n = counts.len();
    let nf = n as f64;
    // cells {1}, {2}, …, {K}, {K+1, …} with nf·P(k) ≥ 5 for k ≤ K and a large enough tail
    let mut cells: Vec<f64> = Vec::new();
    let mut tail = 1.0;
    let mut k = 1u64;
    loop {
        let pk = tail * p;
        if nf * pk < MIN_EXPECTED || nf * (tail - pk) < MIN_EXPECTED {
            break;
        }
        cells.push(pk);
        tail -= pk;
        k += 1;
    }
    let last = k;
    if cells.is_empty() {
        return Ok(TestReport::inconclusive("geometric_fit", vec![n], "expected cell counts below 5"));
    }
    let mut observed = vec![0u64; cells.len() + 1];
    for &c in counts {
        let idx = if c >= last { cells.len() } else { (c - 1) as usize };
        observed[idx] += 1;
    }
    cells.push(tail);
    let statistic: f64 = observed.iter().zip(&cells).map(|(&o, &q)| (o as f64 - nf * q).powi(2) / (nf * q)).sum();
    let dof = cells.len() - 1;
    Ok(TestReport::new("geometric_fit", statistic, chi_square_sf(statistic, dof), level, vec![n]).with("p", p).with("cells", cells.len()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContingencyResult {
    pub statistic: f64,
    pub dof: usize,
}

/// Pearson chi-square for homogeneity of the rows of a count table; empty rows and
/// columns are ignored.
pub fn chi_square_homogeneity(table: &[Vec<f64>]) -> Result<ContingencyResult> {
    let cols = table.first().map_or(0, |r| r.len());
    if table.iter().any(|r| r.len() != cols) {
        return Err(WalkError::Structural("ragged contingency table".into()));
    }
    let row_sum: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sum: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: f64 = row_sum.iter().sum();
    let live_rows = row_sum.iter().filter(|&&s| s > 0.0).count();
    let live_cols = col_sum.iter().filter(|&&s| s > 0.0).count();
    if live_rows < 2 || live_cols < 2 {
        return Ok(ContingencyResult { statistic: 0.0, dof: 0 });
    }
    let mut statistic = 0.0;
    for (r, row) in table.iter().enumerate() {
        for (c, &o) in row.iter().enumerate() {
            let e = row_sum[r] * col_sum[c] / total;
            if e > 0.0 {
                statistic += (o - e).powi(2) / e;
            }
        }
    }
    Ok(ContingencyResult { statistic, dof: (live_rows - 1) * (live_cols - 1) })
}
