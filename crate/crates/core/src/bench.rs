//! Synthetic series data, controlled error injection, pairwise scoring, and
//! the gap baseline.
//!
//! The precision/recall here count unordered row pairs that share a segment.
//! Numbers are only comparable with other runs of this crate.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discovery::{exact_segment, Segmentation};
use crate::error::{Error, Result};
use crate::model::Direction;

/// Shape of a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDatasetConfig {
    pub series_count: usize,
    pub size_min: usize,
    pub size_max: usize,
    /// Probability that a series ascends.
    pub asc_fraction: f64,
    /// First value of the first series.
    pub y_start: i64,
    /// Per-step trend increment range.
    pub step_min: i64,
    pub step_max: i64,
    /// Largest backward move inside a series; the band-width that recovers it.
    pub jitter: i64,
    /// How far the next series starts beyond the end of the previous one,
    /// against its own direction.
    pub series_jump: i64,
    pub null_rate: f64,
    pub x_step_max: i64,
    pub x_gap: i64,
    pub seed: u64,
}

impl Default for SeriesDatasetConfig {
    fn default() -> Self {
        SeriesDatasetConfig {
            series_count: 30,
            size_min: 40,
            size_max: 60,
            asc_fraction: 1.0,
            y_start: 100_000,
            step_min: 0,
            step_max: 2,
            jitter: 1,
            series_jump: 500,
            null_rate: 0.0,
            x_step_max: 3,
            x_gap: 50,
            seed: 0,
        }
    }
}

impl SeriesDatasetConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.size_min == 0 || self.size_min > self.size_max {
            return bad("series sizes need 1 <= size_min <= size_max");
        }
        if !(0.0..=1.0).contains(&self.asc_fraction) || !(0.0..=1.0).contains(&self.null_rate) {
            return bad("rates must lie in [0, 1]");
        }
        if self.step_min < 0 || self.step_min > self.step_max {
            return bad("steps need 0 <= step_min <= step_max");
        }
        if self.jitter < 0 || self.series_jump < 0 || self.x_step_max < 1 || self.x_gap < 1 {
            return bad("jitter and jump must be non-negative, x steps positive");
        }
        Ok(())
    }
}

/// One generated row. `row_id` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratedRow {
    pub row_id: usize,
    pub x: i64,
    pub y: Option<i64>,
}

/// Per-row series id and error flag, indexed by `row_id - 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub series: Vec<usize>,
    pub is_error: Vec<bool>,
}

/// Generates consecutive monotone series with bounded jitter.
///
/// Inside a series `y = trend - U{0..jitter}` (ascending) or
/// `trend + U{0..jitter}` (descending) with a non-decreasing trend, so no
/// in-order pair moves backwards by more than `jitter`.
pub fn generate_dataset(cfg: &SeriesDatasetConfig) -> Result<(Vec<GeneratedRow>, GroundTruth)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut truth = GroundTruth::default();
    let mut x = 0i64;
    let mut last_y = cfg.y_start;
    for series in 0..cfg.series_count {
        let size = rng.gen_range(cfg.size_min..=cfg.size_max);
        let dir = if rng.gen_bool(cfg.asc_fraction) {
            Direction::Asc
        } else {
            Direction::Desc
        };
        let jump = cfg.series_jump + rng.gen_range(0..=cfg.series_jump);
        let mut trend = if series == 0 {
            cfg.y_start
        } else {
            match dir {
                Direction::Asc => last_y - jump,
                Direction::Desc => last_y + jump,
            }
        };
        x += if series == 0 { 1 } else { cfg.x_gap };
        for k in 0..size {
            if k > 0 {
                x += rng.gen_range(1..=cfg.x_step_max);
                let step = rng.gen_range(cfg.step_min..=cfg.step_max);
                trend += if dir == Direction::Asc { step } else { -step };
            }
            let wiggle = rng.gen_range(0..=cfg.jitter);
            let y = if dir == Direction::Asc {
                trend - wiggle
            } else {
                trend + wiggle
            };
            let null = cfg.null_rate > 0.0 && rng.gen_bool(cfg.null_rate);
            rows.push(GeneratedRow {
                row_id: rows.len() + 1,
                x,
                y: (!null).then_some(y),
            });
            truth.series.push(series);
            truth.is_error.push(false);
        }
        last_y = trend;
    }
    Ok((rows, truth))
}

/// Share of injected errors that become nulls instead of random values.
pub const NULL_ERROR_SHARE: f64 = 0.3;

/// Replaces `round(error_rate * n)` uniformly chosen rows with a value drawn
/// from the global `y` range (or null, with probability 0.3) and flags them.
pub fn perturb_cer(
    rows: &[GeneratedRow],
    truth: &GroundTruth,
    error_rate: f64,
    seed: u64,
) -> Result<(Vec<GeneratedRow>, GroundTruth)> {
    if !(0.0..=1.0).contains(&error_rate) {
        return Err(Error::InvalidConfig("error rate must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = rows.to_vec();
    let mut truth = truth.clone();
    let n = rows.len();
    let k = (error_rate * n as f64).round() as usize;
    let (lo, hi) = rows
        .iter()
        .filter_map(|r| r.y)
        .fold((i64::MAX, i64::MIN), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let mut chosen = sample(&mut rng, n, k.min(n)).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        rows[i].y = if lo > hi || rng.gen_bool(NULL_ERROR_SHARE) {
            None
        } else {
            Some(rng.gen_range(lo..=hi))
        };
        truth.is_error[i] = true;
    }
    Ok((rows, truth))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Pairwise co-membership precision, recall and F1 of `predicted` against
/// `truth`; both give one label per row. An empty positive set scores 1.
pub fn pairwise_prf(predicted: &[usize], truth: &[usize]) -> Prf {
    assert_eq!(predicted.len(), truth.len(), "label vectors must cover the same rows");
    let mut cells: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut pred_sizes: BTreeMap<usize, u64> = BTreeMap::new();
    let mut truth_sizes: BTreeMap<usize, u64> = BTreeMap::new();
    for (&p, &t) in predicted.iter().zip(truth) {
        *cells.entry((p, t)).or_default() += 1;
        *pred_sizes.entry(p).or_default() += 1;
        *truth_sizes.entry(t).or_default() += 1;
    }
    let tp: u64 = cells.values().map(|&c| pairs(c)).sum();
    let pp: u64 = pred_sizes.values().map(|&c| pairs(c)).sum();
    let tpos: u64 = truth_sizes.values().map(|&c| pairs(c)).sum();
    let precision = if pp == 0 { 1.0 } else { tp as f64 / pp as f64 };
    let recall = if tpos == 0 { 1.0 } else { tp as f64 / tpos as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf { precision, recall, f1 }
}

/// Segment index of every sorted position.
pub fn position_labels(seg: &Segmentation, n: usize) -> Vec<usize> {
    let mut labels = vec![0; n];
    for (k, s) in seg.segments.iter().enumerate() {
        for l in &mut labels[s.start - 1..s.end] {
            *l = k;
        }
    }
    labels
}

/// Splits wherever the `x` gap exceeds `mean + k_sigma * stddev` of all gaps.
pub fn gap_baseline(xs: &[i64], ys: &[Option<i64>], k_sigma: f64) -> Segmentation {
    let n = xs.len();
    let mut segments = Vec::new();
    if n == 0 {
        return Segmentation::default();
    }
    let mut cuts = Vec::new();
    if n >= 3 {
        let gaps: Vec<f64> = xs.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
        let threshold = mean + k_sigma * var.sqrt();
        cuts.extend(
            gaps.iter()
                .enumerate()
                .filter(|(_, &g)| g > threshold)
                .map(|(k, _)| k + 1),
        );
    }
    let mut start = 1;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        segments.push(exact_segment(ys, start, c, Direction::Asc));
        start = c + 1;
    }
    let total_gain = segments.iter().map(|s| s.weighted_gain()).sum();
    Segmentation { segments, total_gain }
}
