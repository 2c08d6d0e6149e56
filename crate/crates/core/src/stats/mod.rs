//! Cohort-level comparison of two segmentation methods against the manual
//! standard: paired t and Wilcoxon signed-rank tests, percent differences,
//! and intra-/inter-rater variability.

mod compare;
pub mod special;
mod ttest;
mod variability;
mod wilcoxon;

pub use compare::{
    cohort_compare, percent_difference, CohortComparison, ComparisonRow, Direction, Metric, MetricRecord,
};
pub use ttest::paired_t;
pub use variability::{rater_variability, Delineation, Grouping, VariabilityReport};
pub use wilcoxon::{wilcoxon_signed_rank, EXACT_MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    PairedT,
    WilcoxonExact,
    WilcoxonNormal,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::PairedT => "paired_t",
            TestKind::WilcoxonExact => "wilcoxon_exact",
            TestKind::WilcoxonNormal => "wilcoxon_normal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub kind: TestKind,
    /// t for the paired t test, W+ for the signed-rank test.
    pub statistic: f64,
    /// Present only for the paired t test.
    pub df: Option<f64>,
    pub n_effective: usize,
    pub p_two_sided: f64,
}
