//! Serializable reports. Every command prints exactly one of these.
//!
//! Row numbers are 1-based data rows of the input file (header excluded).
//! Exact rationals are written as `"num/den"` strings.

use std::fmt::Display;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

fn ratio<T: Display + PartialEq + From<u8>>(numer: T, denom: T) -> String {
    if denom == T::from(1) {
        numer.to_string()
    } else {
        format!("{numer}/{denom}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub mode: String,
    pub direction: String,
    /// `null` when the band-width is estimated per group.
    pub delta: Option<i64>,
    pub epsilon: usize,
    pub pieces: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub start_row: usize,
    pub end_row: usize,
    pub size: usize,
    pub direction: String,
    pub gain: i64,
    pub cost: usize,
    pub outlier_rows: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier_ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub gain: i64,
    pub segments: usize,
    pub outliers: usize,
    pub non_null: usize,
    pub error_ratio: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub group: Option<String>,
    pub rows: usize,
    pub delta: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_mean: Option<String>,
    pub segments: Vec<SegmentReport>,
    pub totals: Totals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub read_ms: f64,
    pub discover_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryReport {
    pub spec: SpecEcho,
    pub groups: Vec<GroupReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmbGroup {
    pub group: Option<String>,
    pub length: usize,
    pub direction: String,
    pub member_rows: Vec<usize>,
    pub outlier_rows: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member_ids: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier_ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmbReport {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub delta: i64,
    pub groups: Vec<LmbGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub delta: i64,
    pub distance: Option<String>,
    pub degree: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub start_row: usize,
    pub end_row: usize,
    pub size: usize,
    pub error: String,
    pub chosen: i64,
    pub sweep: Vec<SweepEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateGroup {
    pub group: Option<String>,
    pub delta: i64,
    pub mean: String,
    pub segments: Vec<CandidateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub direction: String,
    pub ratio: f64,
    pub delta_max: i64,
    pub groups: Vec<EstimateGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub candidate: String,
    pub delta: i64,
    pub score: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub ranking: Vec<RankEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub rows: usize,
    pub series: usize,
    pub errors: usize,
    pub seed: u64,
    pub output: String,
    pub truth: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub rows: usize,
    pub predicted_segments: usize,
    pub true_series: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub check: String,
    pub rows: usize,
    pub direction: String,
    pub delta: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<usize>,
    /// Band length, best total gain, or fewest segments, by check.
    pub value: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_rows: Option<Vec<usize>>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn ratio_string(r: &Ratio<i64>) -> String {
    ratio(*r.numer(), *r.denom())
}

pub fn usize_ratio_string(r: &Ratio<usize>) -> String {
    ratio(*r.numer() as u64, *r.denom() as u64)
}

/// Tab-separated segment table for spreadsheets.
pub fn discovery_tsv(report: &DiscoveryReport) -> String {
    let mut out = String::from("group\tdelta\tstart_row\tend_row\tsize\tdirection\tgain\tcost\toutlier_rows\n");
    for g in &report.groups {
        for s in &g.segments {
            let outliers: Vec<String> = s.outlier_rows.iter().map(|r| r.to_string()).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                g.group.as_deref().unwrap_or(""),
                g.delta,
                s.start_row,
                s.end_row,
                s.size,
                s.direction,
                s.gain,
                s.cost,
                outliers.join(",")
            ));
        }
    }
    out
}
