//! Machine-readable reports.
//!
//! JSON is the format of record; CSV is a flat projection of the metric rows.
//! Field order is fixed by the struct definitions and every row list is
//! sorted, so identical inputs give byte-identical output.

use std::collections::BTreeMap;
use std::io::{self, Write};

use segeval_core::stats::{ComparisonRow, MetricRecord, TestResult, VariabilityReport};
use segeval_core::{conventions, Error};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub metadata: Metadata,
    pub records: Vec<RecordRow>,
    pub comparisons: Vec<ComparisonOut>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variability: Vec<VariabilityOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub conventions: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(command: &str, timestamp: bool) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            generated_at: timestamp.then(|| chrono::Utc::now().to_rfc3339()),
            conventions: conventions::ALL.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub case_id: String,
    pub method: String,
    pub metric: String,
    pub value: f64,
}

impl From<&MetricRecord> for RecordRow {
    fn from(r: &MetricRecord) -> Self {
        Self {
            case_id: r.case_id.clone(),
            method: r.method.clone(),
            metric: r.metric.name().to_string(),
            value: r.value,
        }
    }
}

impl RecordRow {
    pub fn to_record(&self) -> Result<MetricRecord, Error> {
        Ok(MetricRecord {
            case_id: self.case_id.clone(),
            method: self.method.clone(),
            metric: self.metric.parse()?,
            value: self.value,
        })
    }
}

/// Sorts rows by (case_id, method, metric).
pub fn sort_records(rows: &mut [RecordRow]) {
    rows.sort_by(|a, b| (&a.case_id, &a.method, &a.metric).cmp(&(&b.case_id, &b.method, &b.metric)));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOut {
    pub kind: Option<String>,
    pub statistic: Option<f64>,
    pub df: Option<f64>,
    pub n_effective: Option<usize>,
    pub p_two_sided: Option<f64>,
    /// Why the test was not computed.
    pub flag: Option<String>,
}

impl TestOut {
    fn from_outcome(r: &Result<TestResult, Error>) -> Self {
        match r {
            Ok(t) => Self {
                kind: Some(t.kind.name().to_string()),
                statistic: Some(t.statistic),
                df: t.df,
                n_effective: Some(t.n_effective),
                p_two_sided: Some(t.p_two_sided),
                flag: None,
            },
            Err(e) => Self {
                kind: None,
                statistic: None,
                df: None,
                n_effective: None,
                p_two_sided: None,
                flag: Some(error_flag(e).to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOut {
    pub metric: String,
    pub method_a: String,
    pub method_b: String,
    pub n_cases: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub percent_diff: Option<f64>,
    pub percent_label: Option<String>,
    pub direction: Option<String>,
    pub paired_t: TestOut,
    pub wilcoxon: TestOut,
    pub summary: String,
}

impl ComparisonOut {
    pub fn new(row: &ComparisonRow, method_a: &str, method_b: &str) -> Self {
        Self {
            metric: row.metric.name().to_string(),
            method_a: method_a.to_string(),
            method_b: method_b.to_string(),
            n_cases: row.n_cases,
            mean_a: row.mean_a,
            mean_b: row.mean_b,
            percent_diff: row.percent_diff,
            percent_label: row.percent_diff.map(|p| format!("{p:+.4}%")),
            direction: row.direction.map(|d| d.word().to_string()),
            paired_t: TestOut::from_outcome(&row.t_result),
            wilcoxon: TestOut::from_outcome(&row.w_result),
            summary: summary_sentence(row, method_a, method_b),
        }
    }
}

/// "<metric> for <A> is <|pct|>% (<test>: p = <p>) <higher|lower> compared to <B>"
///
/// The signed-rank result is quoted when available, the paired t result
/// otherwise.
pub fn summary_sentence(row: &ComparisonRow, method_a: &str, method_b: &str) -> String {
    let test = match (&row.w_result, &row.t_result) {
        (Ok(w), _) => format!("{}: p = {}", w.kind.name(), format_sig(w.p_two_sided)),
        (Err(_), Ok(t)) => format!("{}: p = {}", t.kind.name(), format_sig(t.p_two_sided)),
        (Err(w), Err(t)) => format!("no test: {}, {}", error_flag(w), error_flag(t)),
    };
    match (row.percent_diff, row.direction) {
        (Some(p), Some(d)) => {
            format!("{} for {method_a} is {:.4}% ({test}) {} compared to {method_b}", row.metric, p.abs(), d.word())
        }
        _ => format!(
            "{} for {method_a} is undefined against a zero baseline ({test}) compared to {method_b}",
            row.metric
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariabilityOut {
    pub case_id: String,
    pub grouping: String,
    pub mean_pairwise_dice: f64,
    pub volume_cv_percent: f64,
    pub n_pairs: usize,
}

impl VariabilityOut {
    pub fn new(case_id: &str, r: &VariabilityReport) -> Self {
        Self {
            case_id: case_id.to_string(),
            grouping: r.grouping.name().to_string(),
            mean_pairwise_dice: r.mean_pairwise_dice,
            volume_cv_percent: r.volume_cv_percent,
            n_pairs: r.n_pairs,
        }
    }
}

/// Stable identifier for a test that could not be computed.
pub fn error_flag(e: &Error) -> &'static str {
    match e {
        Error::DegenerateVariance => "degenerate_variance",
        Error::AllZeroDifferences => "all_zero_differences",
        Error::TooFewCases(_) => "too_few_cases",
        Error::LengthMismatch(..) => "length_mismatch",
        _ => "error",
    }
}

/// Formats with six significant digits, dropping trailing zeros; scientific
/// notation below 1e-5 or from 1e6 on.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa =
            if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{e}")
    }
}

impl Report {
    pub fn new(metadata: Metadata) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            metadata,
            records: Vec::new(),
            comparisons: Vec::new(),
            warnings: Vec::new(),
            variability: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Flat `case_id,method,metric,value` table.
    pub fn write_records_csv(&self, out: impl Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["case_id", "method", "metric", "value"])?;
        for r in &self.records {
            w.write_record([r.case_id.as_str(), &r.method, &r.metric, &format_sig(r.value)])?;
        }
        w.flush()
    }
}

/// Reads a flat records CSV as written by [`Report::write_records_csv`].
pub fn read_records_csv(input: impl io::Read) -> Result<Vec<RecordRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use segeval_core::stats::{cohort_compare, Metric};

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(2.0 / 3.0), "0.666667");
        assert_eq!(format_sig(0.25), "0.25");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(27.0), "27");
        assert_eq!(format_sig(14.285714285714), "14.2857");
        assert_eq!(format_sig(123456.7), "123457");
        assert_eq!(format_sig(1234567.0), "1.23457e6");
        assert_eq!(format_sig(9.313225746154785e-10), "9.31323e-10");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(0.057190958417936), "0.057191");
    }

    fn rec(case: &str, method: &str, v: f64) -> MetricRecord {
        MetricRecord { case_id: case.into(), method: method.into(), metric: Metric::Dice, value: v }
    }

    #[test]
    fn paper_style_sentence() {
        let recs = vec![
            rec("1", "A", 0.80),
            rec("1", "B", 0.70),
            rec("2", "A", 0.82),
            rec("2", "B", 0.72),
            rec("3", "A", 0.78),
            rec("3", "B", 0.68),
        ];
        let cmp = cohort_compare(&recs, "A", "B").unwrap();
        let out = ComparisonOut::new(&cmp.rows[0], "A", "B");
        assert_eq!(out.summary, "dice for A is 14.2857% (wilcoxon_exact: p = 0.25) higher compared to B");
        assert_eq!(out.percent_label.as_deref(), Some("+14.2857%"));
        assert_eq!(out.paired_t.flag.as_deref(), Some("degenerate_variance"));
        assert_eq!(out.wilcoxon.p_two_sided, Some(0.25));
    }

    #[test]
    fn json_roundtrip_and_keys() {
        let mut r = Report::new(Metadata::new("test", false));
        r.records.push(RecordRow { case_id: "c".into(), method: "m".into(), metric: "dice".into(), value: 0.5 });
        let json = r.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["comparisons", "metadata", "records", "schema_version", "warnings"].map(String::from));
        assert!(json.find("\"schema_version\"").unwrap() < json.find("\"metadata\"").unwrap());
        assert_eq!(Report::from_json(&json).unwrap(), r);
        assert!(v["metadata"].get("generated_at").is_none());
    }

    #[test]
    fn csv_projection() {
        let mut r = Report::new(Metadata::new("test", false));
        r.records.push(RecordRow { case_id: "c".into(), method: "m".into(), metric: "dice".into(), value: 2.0 / 3.0 });
        let mut buf = Vec::new();
        r.write_records_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "case_id,method,metric,value\nc,m,dice,0.666667\n");
        let back = read_records_csv(&buf[..]).unwrap();
        assert_eq!(back[0].metric, "dice");
    }
}
