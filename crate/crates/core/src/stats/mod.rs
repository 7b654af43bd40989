//! Goodness-of-fit and estimation tools shared by the experiments.

mod binned;
mod empirical;
mod ks;
mod moments;
mod rearrangement;
mod tables;

pub use binned::{binned_conditional_test, monitored_conditional_test, BinReference, BinnedReport, MonitoredReport, MIN_BIN_SIZE, STABILITY_BAND, TRIM};
pub use empirical::EmpiricalDistribution;
pub use ks::{kolmogorov_sf, ks_one_sample, ks_two_sample, KS_MIN_SAMPLE};
pub use moments::{mean_ci, pearson, spearman, MeanEstimate, RankCorrelation};
pub use rearrangement::{rearrangement_check, DiscreteLaw, RearrangementReport};
pub use tables::{chi_square_homogeneity, chi_square_sf, geometric_fit, ContingencyResult};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Pass,
    Fail,
    Inconclusive,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::Pass => "pass",
            Decision::Fail => "fail",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of one hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub level: f64,
    pub decision: Decision,
    pub sizes: Vec<usize>,
    pub metadata: Vec<(String, String)>,
}

impl TestReport {
    pub fn new(name: impl Into<String>, statistic: f64, p_value: f64, level: f64, sizes: Vec<usize>) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        let decision = if p_value > level { Decision::Pass } else { Decision::Fail };
        Self { name: name.into(), statistic, p_value, level, decision, sizes, metadata: Vec::new() }
    }

    pub fn inconclusive(name: impl Into<String>, sizes: Vec<usize>, reason: &str) -> Self {
        let mut r =
            Self { name: name.into(), statistic: f64::NAN, p_value: f64::NAN, level: f64::NAN, decision: Decision::Inconclusive, sizes, metadata: Vec::new() };
        r.metadata.push(("reason".into(), reason.into()));
        r
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn passed(&self) -> bool {
        self.decision == Decision::Pass
    }

    pub const CSV_HEADER: [&'static str; 7] = ["test", "statistic", "p_value", "level", "decision", "sizes", "metadata"];

    /// Flat record matching `CSV_HEADER`.
    pub fn csv_record(&self) -> [String; 7] {
        let sizes = self.sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        let meta = self.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        [
            self.name.clone(),
            format!("{}", self.statistic),
            format!("{}", self.p_value),
            format!("{}", self.level),
            self.decision.as_str().to_string(),
            sizes,
            meta,
        ]
    }
}
