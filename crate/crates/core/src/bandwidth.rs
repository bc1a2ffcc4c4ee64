//! Band-width estimation by distinctive degree.
//!
//! For a candidate band-width the average distance between each outlier and
//! its estimated repair is measured; the band-width where that average jumps
//! the most, relative to its own size, is picked per segment and the picks
//! are averaged.

use num_rational::Ratio;

use crate::discovery::abod_error_ratio;
use crate::error::{Error, Result};
use crate::lmb::{compute_lmb_oriented, LmbResult};
use crate::model::{Direction, Orientation};

/// Estimated repair of the outlier at 1-based position `j`: the floored
/// midpoint of the nearest band constraints on each side.
///
/// Ascending bands use the largest member before `j` and the smallest after;
/// descending bands the reverse. With one side empty the other side is used.
pub fn estimate_repair(ys: &[Option<i64>], band: &LmbResult, j: usize) -> Result<i64> {
    let (mut left, mut right): (Option<i64>, Option<i64>) = (None, None);
    let pick =
        |acc: Option<i64>, v: i64, want_max: bool| Some(acc.map_or(v, |a| if want_max { a.max(v) } else { a.min(v) }));
    let asc = band.direction == Direction::Asc;
    for &p in &band.members {
        let Some(v) = ys[p - 1] else { continue };
        if p < j {
            left = pick(left, v, asc);
        } else if p > j {
            right = pick(right, v, !asc);
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok((l + r).div_euclid(2)),
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => Err(Error::UndefinedRepair { position: j }),
    }
}

fn repairs(ys: &[Option<i64>], band: &LmbResult) -> Vec<(usize, i64)> {
    let n = ys.len();
    let asc = band.direction == Direction::Asc;
    let better = |a: i64, b: i64, want_max: bool| if want_max { a.max(b) } else { a.min(b) };
    let mut is_member = vec![false; n];
    for &p in &band.members {
        is_member[p - 1] = true;
    }
    let mut before = vec![None; n];
    let mut acc: Option<i64> = None;
    for i in 0..n {
        before[i] = acc;
        if is_member[i] {
            let v = ys[i].expect("members are non-null");
            acc = Some(acc.map_or(v, |a| better(a, v, asc)));
        }
    }
    let mut after = vec![None; n];
    acc = None;
    for i in (0..n).rev() {
        after[i] = acc;
        if is_member[i] {
            let v = ys[i].expect("members are non-null");
            acc = Some(acc.map_or(v, |a| better(a, v, !asc)));
        }
    }
    band.outliers
        .iter()
        .filter_map(|&p| {
            let r = match (before[p - 1], after[p - 1]) {
                (Some(l), Some(r)) => Some((l + r).div_euclid(2)),
                (Some(v), None) | (None, Some(v)) => Some(v),
                (None, None) => None,
            };
            r.map(|r| (p, r))
        })
        .collect()
}

/// Mean absolute distance between outliers and their repairs; `None` when the
/// band has no outliers.
pub fn outlier_distance(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Option<Ratio<i64>> {
    let band = compute_lmb_oriented(ys, delta, orientation);
    let rep = repairs(ys, &band);
    if rep.is_empty() {
        return None;
    }
    let total: i64 = rep
        .iter()
        .map(|&(p, r)| (r - ys[p - 1].expect("outliers are non-null")).abs())
        .sum();
    Some(Ratio::new(total, rep.len() as i64))
}

/// Relative jump of the outlier distance between `delta - 1` and `delta`.
pub fn distinctive_degree(d_curr: Option<Ratio<i64>>, d_prev: Option<Ratio<i64>>, delta: i64) -> Ratio<i64> {
    let zero = Ratio::from_integer(0);
    if delta == 0 {
        return zero;
    }
    match (d_curr, d_prev) {
        (Some(c), Some(p)) if c != zero => (c - p) / c,
        _ => zero,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub delta: i64,
    pub distance: Option<Ratio<i64>>,
    pub degree: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandwidthSweep {
    pub per_delta: Vec<SweepRow>,
    pub chosen: i64,
}

/// Tries every band-width in `0..=delta_max` and keeps the first maximum.
pub fn sweep(ys: &[Option<i64>], delta_max: i64, orientation: Orientation) -> BandwidthSweep {
    let mut per_delta = Vec::with_capacity(delta_max as usize + 1);
    let mut prev = None;
    let mut chosen = (0, Ratio::from_integer(0));
    for delta in 0..=delta_max {
        let d = outlier_distance(ys, delta, orientation);
        let a = distinctive_degree(d, prev, delta);
        if a > chosen.1 {
            chosen = (delta, a);
        }
        per_delta.push(SweepRow {
            delta,
            distance: d,
            degree: a,
        });
        prev = d;
    }
    BandwidthSweep {
        per_delta,
        chosen: chosen.0,
    }
}

/// A contiguous stretch produced by the divide step. 1-based, inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSegment {
    pub start: usize,
    pub end: usize,
    pub error: Ratio<usize>,
}

/// Direction used to test the plain order dependency while dividing: the
/// declared one, ascending when either direction is allowed.
pub fn division_direction(orientation: Orientation) -> Direction {
    match orientation {
        Orientation::Desc => Direction::Desc,
        _ => Direction::Asc,
    }
}

/// Halves the sequence recursively until each piece satisfies the zero-width
/// dependency within `approx_ratio`, or is at most two tuples long.
pub fn divide_into_candidate_segments(
    ys: &[Option<i64>],
    approx_ratio: f64,
    direction: Direction,
) -> Vec<CandidateSegment> {
    let mut out = Vec::new();
    if !ys.is_empty() {
        divide(ys, 0, ys.len(), approx_ratio, direction, &mut out);
    }
    out
}

fn divide(ys: &[Option<i64>], lo: usize, hi: usize, ratio: f64, dir: Direction, out: &mut Vec<CandidateSegment>) {
    let error = abod_error_ratio(&ys[lo..hi], 0, dir.into()).ratio;
    let err_f = *error.numer() as f64 / *error.denom() as f64;
    if err_f <= ratio || hi - lo <= 2 {
        out.push(CandidateSegment {
            start: lo + 1,
            end: hi,
            error,
        });
        return;
    }
    let mid = lo + (hi - lo) / 2;
    divide(ys, lo, mid, ratio, dir, out);
    divide(ys, mid, hi, ratio, dir, out);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandwidthEstimate {
    pub delta: i64,
    pub mean: Ratio<i64>,
    pub segments: Vec<(CandidateSegment, BandwidthSweep)>,
}

/// Averaged per-segment band-width, rounded half away from zero.
pub fn estimate_bandwidth(
    ys: &[Option<i64>],
    delta_max: i64,
    approx_ratio: f64,
    orientation: Orientation,
) -> Result<BandwidthEstimate> {
    if delta_max < 1 {
        return Err(Error::InvalidConfig("delta_max must be at least 1".into()));
    }
    if !(approx_ratio > 0.0 && approx_ratio < 1.0) {
        return Err(Error::InvalidConfig("approximation ratio must lie in (0, 1)".into()));
    }
    let segs = divide_into_candidate_segments(ys, approx_ratio, division_direction(orientation));
    let segments: Vec<_> = segs
        .into_iter()
        .map(|c| {
            let sw = sweep(&ys[c.start - 1..c.end], delta_max, orientation);
            (c, sw)
        })
        .collect();
    let mean = if segments.is_empty() {
        Ratio::from_integer(0)
    } else {
        let total: i64 = segments.iter().map(|(_, s)| s.chosen).sum();
        Ratio::new(total, segments.len() as i64)
    };
    Ok(BandwidthEstimate {
        delta: mean.round().to_integer(),
        mean,
        segments,
    })
}

/// A user-supplied candidate dependency scored by its averaged distinctive degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedCandidate {
    pub name: String,
    pub delta: i64,
    pub score: Ratio<i64>,
}

/// Ranks candidates by the mean distinctive degree of their per-segment
/// picks, highest first; ties keep input order.
pub fn rank_candidates(
    candidates: &[(String, Vec<Option<i64>>)],
    delta_max: i64,
    approx_ratio: f64,
    orientation: Orientation,
) -> Result<Vec<RankedCandidate>> {
    let mut ranked = Vec::with_capacity(candidates.len());
    for (name, ys) in candidates {
        let est = estimate_bandwidth(ys, delta_max, approx_ratio, orientation)?;
        let k = est.segments.len().max(1) as i64;
        let sum = est.segments.iter().fold(Ratio::from_integer(0), |acc, (_, s)| {
            acc + s.per_delta[s.chosen as usize].degree
        });
        ranked.push(RankedCandidate {
            name: name.clone(),
            delta: est.delta,
            score: sum / k,
        });
    }
    ranked.sort_by_key(|r| std::cmp::Reverse(r.score));
    Ok(ranked)
}
