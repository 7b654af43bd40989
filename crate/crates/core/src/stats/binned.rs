use serde::Serialize;

use super::{ks_one_sample, EmpiricalDistribution, TestReport};
use crate::error::{Result, WalkError};
use crate::special::{gig_cdf_point, GigLaw};

/// Fewest values a bin needs before its test counts.
pub const MIN_BIN_SIZE: usize = 200;
/// Share of pairs dropped at each end of the `Γ` range.
pub const TRIM: f64 = 0.01;

/// Which GIG law the values of `S` in one `Γ` bin are compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinReference {
    /// The law at the median `Γ` of the bin.
    Median,
    /// Each value transformed by the CDF at its own `Γ`, then tested for uniformity.
    PerSample,
}

#[derive(Debug, Clone, Serialize)]
pub struct BinnedReport {
    pub order: f64,
    pub level: f64,
    pub reference: BinReference,
    pub bins: Vec<TestReport>,
    /// Share of conclusive bins that pass.
    pub pass_rate: f64,
    pub conclusive: usize,
    pub dropped_low: usize,
    pub dropped_high: usize,
}

impl BinnedReport {
    pub fn meets(&self, threshold: f64) -> bool {
        self.conclusive > 0 && self.pass_rate >= threshold
    }
}

/// Conditional law test of `S` given `Γ` against `GigLaw(order, 2Γ)`, on `bins`
/// equal-count bins of `Γ` after dropping the lowest and highest percent.
pub fn binned_conditional_test(pairs: &[(f64, f64)], order: f64, bins: usize, level: f64, reference: BinReference) -> Result<BinnedReport> {
    if bins == 0 {
        return Err(WalkError::Parameter("need at least one bin".into()));
    }
    if let Some(i) = pairs.iter().position(|&(g, s)| !(g > 0.0 && g.is_finite() && s.is_finite())) {
        return Err(WalkError::Parameter(format!("pair {i} = {:?} is not a valid (Γ, S)", pairs[i])));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len();
    let cut = (TRIM * n as f64).floor() as usize;
    let kept = &sorted[cut..n - cut];
    let m = kept.len();
    let mut reports = Vec::with_capacity(bins);
    for b in 0..bins {
        let chunk = &kept[b * m / bins..(b + 1) * m / bins];
        let name = format!("bin_{b}");
        if chunk.len() < MIN_BIN_SIZE {
            reports.push(TestReport::inconclusive(name, vec![chunk.len()], "too few values"));
            continue;
        }
        let gammas = EmpiricalDistribution::new(chunk.iter().map(|p| p.0).collect())?;
        let median = gammas.median();
        let report = match reference {
            BinReference::Median => {
                let table = GigLaw::for_gamma_stat(order, median)?.cdf_table();
                let s = EmpiricalDistribution::new(chunk.iter().map(|p| p.1).collect())?;
                ks_one_sample(&s, |x| table.cdf(x), level)?
            }
            BinReference::PerSample => {
                let u = chunk.iter().map(|&(g, s)| gig_cdf_point(order, 2.0 * g, s)).collect::<Result<Vec<_>>>()?;
                ks_one_sample(&EmpiricalDistribution::new(u)?, |x| x.clamp(0.0, 1.0), level)?
            }
        };
        let mut report = report.with("gamma_lo", gammas.values()[0]).with("gamma_median", median).with("gamma_hi", gammas.values()[chunk.len() - 1]);
        report.name = name;
        reports.push(report);
    }
    let conclusive = reports.iter().filter(|r| r.decision != super::Decision::Inconclusive).count();
    let passed = reports.iter().filter(|r| r.passed()).count();
    let pass_rate = if conclusive == 0 { f64::NAN } else { passed as f64 / conclusive as f64 };
    Ok(BinnedReport { order, level, reference, bins: reports, pass_rate, conclusive, dropped_low: cut, dropped_high: cut })
}

/// Largest pass-rate change between `bins` and `2 bins` under the median reference
/// that is still read as bin-width stable.
pub const STABILITY_BAND: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct MonitoredReport {
    pub median: BinnedReport,
    pub median_doubled: BinnedReport,
    /// Run only when the median reference moved by `STABILITY_BAND` or more.
    pub per_sample: Option<BinnedReport>,
}

impl MonitoredReport {
    pub fn stable(&self) -> bool {
        // no conclusive bins at either count leaves nothing to compare
        !((self.median.pass_rate - self.median_doubled.pass_rate).abs() >= STABILITY_BAND)
    }

    /// The report the verdict rests on: the median reference when stable,
    /// otherwise the per-sample reference at the original bin count.
    pub fn verdict(&self) -> &BinnedReport {
        self.per_sample.as_ref().unwrap_or(&self.median)
    }
}

/// Median-reference test with a bin-doubling stability check; falls back to the
/// per-sample reference when the two bin counts disagree.
pub fn monitored_conditional_test(pairs: &[(f64, f64)], order: f64, bins: usize, level: f64) -> Result<MonitoredReport> {
    let median = binned_conditional_test(pairs, order, bins, level, BinReference::Median)?;
    let median_doubled = binned_conditional_test(pairs, order, 2 * bins, level, BinReference::Median)?;
    let mut report = MonitoredReport { median, median_doubled, per_sample: None };
    if !report.stable() {
        report.per_sample = Some(binned_conditional_test(pairs, order, bins, level, BinReference::PerSample)?);
    }
    Ok(report)
}
