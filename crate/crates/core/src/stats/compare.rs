use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{paired_t, wilcoxon_signed_rank, TestResult};
use crate::error::{Error, Result};

/// Per-case metrics a cohort table can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Dice,
    Jaccard,
    Precision,
    Recall,
    VolumeSimilarity,
    Hausdorff,
    Hd95,
    MeanSd,
    Rms,
    VolumeMm3,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::Dice,
        Metric::Jaccard,
        Metric::Precision,
        Metric::Recall,
        Metric::VolumeSimilarity,
        Metric::Hausdorff,
        Metric::Hd95,
        Metric::MeanSd,
        Metric::Rms,
        Metric::VolumeMm3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Dice => "dice",
            Metric::Jaccard => "jaccard",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::VolumeSimilarity => "volume_similarity",
            Metric::Hausdorff => "hausdorff",
            Metric::Hd95 => "hd95",
            Metric::MeanSd => "mean_sd",
            Metric::Rms => "rms",
            Metric::VolumeMm3 => "volume_mm3",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL.into_iter().find(|m| m.name() == s).ok_or(Error::InvalidArgument("unknown metric name"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub case_id: String,
    pub method: String,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Higher,
    Lower,
}

impl Direction {
    pub fn word(self) -> &'static str {
        match self {
            Direction::Higher => "higher",
            Direction::Lower => "lower",
        }
    }
}

/// `100 (mean_a - mean_b) / mean_b` and its sign as a word. Zero counts as
/// higher.
pub fn percent_difference(mean_a: f64, mean_b: f64) -> Result<(f64, Direction)> {
    if mean_b == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    let pct = 100.0 * (mean_a - mean_b) / mean_b;
    let dir = if pct < 0.0 { Direction::Lower } else { Direction::Higher };
    Ok((pct, dir))
}

/// Method A against method B on one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub metric: Metric,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `None` when B's mean is zero and A's is not.
    pub percent_diff: Option<f64>,
    pub direction: Option<Direction>,
    pub t_result: Result<TestResult>,
    pub w_result: Result<TestResult>,
    pub n_cases: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortComparison {
    /// Sorted by metric name.
    pub rows: Vec<ComparisonRow>,
    /// (metric, case) entries present for only one of the two methods.
    pub unpaired_dropped: usize,
}

/// Pairs every metric by case id and compares method A to baseline B.
///
/// Records of other methods (the manual reference included) are ignored.
/// Per-metric test failures such as zero variance are kept in the row rather
/// than failing the comparison.
pub fn cohort_compare(records: &[MetricRecord], method_a: &str, method_b: &str) -> Result<CohortComparison> {
    type Column<'r> = BTreeMap<&'r str, f64>;
    let mut by_metric: BTreeMap<&'static str, (Metric, Column, Column)> = BTreeMap::new();
    for r in records {
        let side = if r.method == method_a {
            0
        } else if r.method == method_b {
            1
        } else {
            continue;
        };
        let entry = by_metric.entry(r.metric.name()).or_insert_with(|| (r.metric, BTreeMap::new(), BTreeMap::new()));
        let column = if side == 0 { &mut entry.1 } else { &mut entry.2 };
        if column.insert(r.case_id.as_str(), r.value).is_some() {
            return Err(Error::InvalidArgument("duplicate (case_id, method, metric) record"));
        }
    }

    let mut rows = Vec::new();
    let mut unpaired_dropped = 0;
    for (metric, a, b) in by_metric.into_values() {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (case, va) in &a {
            if let Some(vb) = b.get(case) {
                xs.push(*va);
                ys.push(*vb);
            }
        }
        unpaired_dropped += a.len() + b.len() - 2 * xs.len();
        if xs.is_empty() {
            continue;
        }
        let n = xs.len() as f64;
        let mean_a = xs.iter().sum::<f64>() / n;
        let mean_b = ys.iter().sum::<f64>() / n;
        let pct =
            if mean_a == mean_b { Some((0.0, Direction::Higher)) } else { percent_difference(mean_a, mean_b).ok() };
        rows.push(ComparisonRow {
            metric,
            mean_a,
            mean_b,
            percent_diff: pct.map(|p| p.0),
            direction: pct.map(|p| p.1),
            t_result: paired_t(&xs, &ys),
            w_result: wilcoxon_signed_rank(&xs, &ys),
            n_cases: xs.len(),
        });
    }
    if rows.is_empty() {
        return Err(Error::NoPairedCases);
    }
    Ok(CohortComparison { rows, unpaired_dropped })
}
