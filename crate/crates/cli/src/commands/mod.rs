pub mod accelerate;
pub mod cemetery;
pub mod identity;
pub mod my;
pub mod reversal;
pub mod selftest;
pub mod torus;

use walklab_core::stats::{ks_two_sample, EmpiricalDistribution, MonitoredReport, TestReport};

use crate::error::CliResult;
use crate::output::RunOutput;

/// Share of conclusive bins that must pass.
pub const BIN_PASS_RATE: f64 = 0.95;

/// Two-sample KS between `f` applied to the first half and `g` applied to the second
/// half, so that the two samples are independent.
pub fn split_two_sample<T>(name: &str, draws: &[T], f: impl Fn(&T) -> f64, g: impl Fn(&T) -> f64, level: f64) -> CliResult<TestReport> {
    let (a, b) = draws.split_at(draws.len() / 2);
    let a = EmpiricalDistribution::new(a.iter().map(f).collect())?;
    let b = EmpiricalDistribution::new(b.iter().map(g).collect())?;
    let mut r = ks_two_sample(&a, &b, level)?;
    r.name = name.into();
    Ok(r)
}

/// Writes every bin table of a monitored test and describes its verdict.
pub fn write_monitored(out: &mut RunOutput, stem: &str, m: &MonitoredReport) -> CliResult<String> {
    out.reports(&format!("{stem}_median"), &m.median.bins)?;
    out.reports(&format!("{stem}_median_doubled"), &m.median_doubled.bins)?;
    if let Some(p) = &m.per_sample {
        out.reports(&format!("{stem}_per_sample"), &p.bins)?;
    }
    let v = m.verdict();
    let mut detail = format!(
        "pass rate {:.3} over {} conclusive bins ({:?} reference); median reference {:.3} at {} bins, {:.3} at {} bins",
        v.pass_rate,
        v.conclusive,
        v.reference,
        m.median.pass_rate,
        m.median.bins.len(),
        m.median_doubled.pass_rate,
        m.median_doubled.bins.len()
    );
    if !m.stable() {
        detail.push_str("; unstable under bin doubling, verdict from per-sample reference");
    }
    Ok(detail)
}
