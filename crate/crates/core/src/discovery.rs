//! Approximate, conditional, and approximate-conditional band OD discovery.

use std::time::Instant;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::lmb::{self, BestTupleState};
use crate::model::{BandOdSpec, Direction, Orientation};

/// One series of a segmentation. Positions are 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
    pub gain: i64,
    pub cost: usize,
    pub outliers: Vec<usize>,
    pub members: Vec<usize>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Non-null tuples in the segment.
    pub fn non_null(&self) -> usize {
        self.members.len() + self.outliers.len()
    }

    /// Contribution to the total: gain weighted by the non-null size.
    pub fn weighted_gain(&self) -> i64 {
        self.gain * self.non_null() as i64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
    pub total_gain: i64,
}

impl Segmentation {
    pub fn max_cost(&self) -> usize {
        self.segments.iter().map(|s| s.cost).max().unwrap_or(0)
    }

    pub fn outliers(&self) -> Vec<usize> {
        self.segments.iter().flat_map(|s| s.outliers.iter().copied()).collect()
    }
}

/// Band statistics of one range under one direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeEval {
    pub direction: Direction,
    pub gain: i64,
    pub cost: usize,
    pub non_null: usize,
    pub members: Vec<usize>,
    pub outliers: Vec<usize>,
}

/// Longest run of non-null outliers; nulls neither break nor extend a run.
/// `members` are 0-based offsets into `ys`, sorted.
fn longest_outlier_run(ys: &[Option<i64>], members: &[usize]) -> usize {
    let mut m = members.iter().peekable();
    let (mut run, mut best) = (0usize, 0usize);
    for (i, y) in ys.iter().enumerate() {
        if m.peek() == Some(&&i) {
            m.next();
            run = 0;
        } else if y.is_some() {
            run += 1;
            best = best.max(run);
        }
    }
    best
}

/// Gain, cost and band of `T[i, j]` (1-based, inclusive) in direction `dir`.
pub fn evaluate_range(ys: &[Option<i64>], i: usize, j: usize, delta: i64, dir: Direction) -> RangeEval {
    let slice = &ys[i - 1..j];
    let band = lmb::compute_lmb(slice, delta, dir);
    let shift = |v: Vec<usize>| v.into_iter().map(|p| p + i - 1).collect::<Vec<_>>();
    let members0: Vec<usize> = band.members.iter().map(|p| p - 1).collect();
    let cost = longest_outlier_run(slice, &members0);
    let non_null = band.length + band.outliers.len();
    RangeEval {
        direction: dir,
        gain: band.length as i64 - band.outliers.len() as i64,
        cost,
        non_null,
        members: shift(band.members),
        outliers: shift(band.outliers),
    }
}

/// Band members minus non-null outliers over `T[i, j]`.
pub fn gain_of_range(ys: &[Option<i64>], i: usize, j: usize, delta: i64, dir: Direction) -> i64 {
    evaluate_range(ys, i, j, delta, dir).gain
}

/// Longest run of consecutive non-null outliers over `T[i, j]`.
pub fn cost_of_range(ys: &[Option<i64>], i: usize, j: usize, delta: i64, dir: Direction) -> usize {
    evaluate_range(ys, i, j, delta, dir).cost
}

/// Picks the direction for a range: the largest gain among the directions
/// whose cost fits the budget, ascending first on ties.
pub fn best_feasible_range(
    ys: &[Option<i64>],
    i: usize,
    j: usize,
    delta: i64,
    epsilon: usize,
    orientation: Orientation,
) -> Option<RangeEval> {
    let mut best: Option<RangeEval> = None;
    for &dir in orientation.directions() {
        let e = evaluate_range(ys, i, j, delta, dir);
        if e.cost <= epsilon && best.as_ref().is_none_or(|b| e.gain > b.gain) {
            best = Some(e);
        }
    }
    best
}

/// Result of the approximate (abOD) check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbodResult {
    pub ratio: Ratio<usize>,
    pub direction: Direction,
    pub members: Vec<usize>,
    pub outliers: Vec<usize>,
}

/// Fraction of tuples that must be removed for the band OD to hold.
pub fn abod_error_ratio(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> AbodResult {
    let band = lmb::compute_lmb_oriented(ys, delta, orientation);
    let ratio = if ys.is_empty() {
        Ratio::from_integer(0)
    } else {
        Ratio::new(band.outliers.len(), ys.len())
    };
    AbodResult {
        ratio,
        direction: band.direction,
        members: band.members,
        outliers: band.outliers,
    }
}

pub(crate) fn exact_segment(ys: &[Option<i64>], start: usize, end: usize, direction: Direction) -> Segment {
    let members: Vec<usize> = (start..=end).filter(|&p| ys[p - 1].is_some()).collect();
    Segment {
        start,
        end,
        direction,
        gain: members.len() as i64,
        cost: 0,
        outliers: Vec::new(),
        members,
    }
}

/// Minimal split into segments on which the band OD holds exactly.
///
/// One left-to-right scan: a segment grows while the next value stays within
/// `delta` of the running extreme, and the violating tuple opens the next one.
pub fn bcod_segment(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Segmentation {
    let mut segments = Vec::new();
    let mut start = 1;
    let (mut hi, mut lo) = (i64::MIN, i64::MAX);
    let allow_asc = orientation != Orientation::Desc;
    let allow_desc = orientation != Orientation::Asc;
    let (mut asc_ok, mut desc_ok) = (allow_asc, allow_desc);
    for (idx, y) in ys.iter().enumerate() {
        let Some(y) = *y else { continue };
        let pos = idx + 1;
        let asc_next = asc_ok && (hi == i64::MIN || y >= hi.saturating_sub(delta));
        let desc_next = desc_ok && (lo == i64::MAX || y <= lo.saturating_add(delta));
        if asc_next || desc_next {
            asc_ok = asc_next;
            desc_ok = desc_next;
        } else {
            let dir = if asc_ok { Direction::Asc } else { Direction::Desc };
            segments.push(exact_segment(ys, start, pos - 1, dir));
            start = pos;
            asc_ok = allow_asc;
            desc_ok = allow_desc;
            hi = i64::MIN;
            lo = i64::MAX;
        }
        hi = hi.max(y);
        lo = lo.min(y);
    }
    if !ys.is_empty() {
        let dir = if asc_ok { Direction::Asc } else { Direction::Desc };
        segments.push(exact_segment(ys, start, ys.len(), dir));
    }
    let total_gain = segments.iter().map(Segment::weighted_gain).sum();
    Segmentation { segments, total_gain }
}

/// How the segmentation DP evaluates candidate ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DpStrategy {
    /// Recompute the band of every candidate range from scratch.
    Recompute,
    /// Grow one best-tuple state per start point and reconstruct a band only
    /// when the range could win.
    #[default]
    Incremental,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DpOptions {
    pub strategy: DpStrategy,
    pub deadline: Option<Instant>,
}

/// The DP arrays, indexed like `cuts`.
///
/// `gain[k]` is the optimum over `T[1, cuts[k]]`; `start[k]` the 1-based first
/// position of its last segment; `segments[k]` the segment count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    pub cuts: Vec<usize>,
    pub gain: Vec<Option<i64>>,
    pub start: Vec<usize>,
    pub segments: Vec<usize>,
    pub direction: Vec<Option<Direction>>,
}

#[derive(Clone, Copy)]
struct Best {
    value: i64,
    segments: usize,
    from: usize,
    dir: Direction,
}

// Higher value, then fewer segments, then the later split point; callers try
// split points in increasing order so equality favours the newcomer.
fn beats(value: i64, segments: usize, current: Option<&Best>) -> bool {
    match current {
        None => true,
        Some(b) => value > b.value || (value == b.value && segments <= b.segments),
    }
}

fn check_deadline(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::Deadline),
        _ => Ok(()),
    }
}

fn validate_cuts(cuts: &[usize], n: usize) -> Result<()> {
    let ok = cuts.first() == Some(&0) && cuts.last() == Some(&n) && cuts.windows(2).all(|w| w[0] < w[1]);
    if ok || (n == 0 && cuts == [0]) {
        Ok(())
    } else {
        Err(Error::InvalidConfig("cut points must rise strictly from 0 to n".into()))
    }
}

/// Segmentation DP restricted to the split points in `cuts` (0-based
/// boundaries, `0` and `n` included).
pub fn segment_dp(
    ys: &[Option<i64>],
    spec: &BandOdSpec,
    cuts: &[usize],
    opts: DpOptions,
) -> Result<(Segmentation, DpTable)> {
    let n = ys.len();
    validate_cuts(cuts, n)?;
    let m = cuts.len();
    let mut best: Vec<Option<Best>> = vec![None; m];
    best[0] = Some(Best {
        value: 0,
        segments: 0,
        from: 0,
        dir: Direction::Asc,
    });
    match opts.strategy {
        DpStrategy::Recompute => {
            for jj in 1..m {
                for ii in 0..jj {
                    check_deadline(opts.deadline)?;
                    let Some(prev) = best[ii] else { continue };
                    let Some(e) =
                        best_feasible_range(ys, cuts[ii] + 1, cuts[jj], spec.delta, spec.epsilon, spec.orientation)
                    else {
                        continue;
                    };
                    let value = prev.value + e.gain * e.non_null as i64;
                    let segments = prev.segments + 1;
                    if beats(value, segments, best[jj].as_ref()) {
                        best[jj] = Some(Best {
                            value,
                            segments,
                            from: ii,
                            dir: e.direction,
                        });
                    }
                }
            }
        }
        DpStrategy::Incremental => incremental_fill(ys, spec, cuts, opts.deadline, &mut best)?,
    }
    let Some(last) = best[m - 1] else {
        return Err(Error::InvalidConfig(
            "no segmentation satisfies the error budget".into(),
        ));
    };
    let mut segments = Vec::new();
    let mut jj = m - 1;
    while jj > 0 {
        let b = best[jj].expect("reachable cut");
        let e = evaluate_range(ys, cuts[b.from] + 1, cuts[jj], spec.delta, b.dir);
        segments.push(Segment {
            start: cuts[b.from] + 1,
            end: cuts[jj],
            direction: b.dir,
            gain: e.gain,
            cost: e.cost,
            outliers: e.outliers,
            members: e.members,
        });
        jj = b.from;
    }
    segments.reverse();
    let table = DpTable {
        cuts: cuts.to_vec(),
        gain: best.iter().map(|b| b.map(|b| b.value)).collect(),
        start: best.iter().map(|b| b.map_or(0, |b| cuts[b.from] + 1)).collect(),
        segments: best.iter().map(|b| b.map_or(0, |b| b.segments)).collect(),
        direction: best
            .iter()
            .enumerate()
            .map(|(k, b)| if k == 0 { None } else { b.map(|b| b.dir) })
            .collect(),
    };
    Ok((
        Segmentation {
            segments,
            total_gain: last.value,
        },
        table,
    ))
}

fn incremental_fill(
    ys: &[Option<i64>],
    spec: &BandOdSpec,
    cuts: &[usize],
    deadline: Option<Instant>,
    best: &mut [Option<Best>],
) -> Result<()> {
    let n = ys.len();
    let m = cuts.len();
    let dirs = spec.orientation.directions();
    for ii in 0..m - 1 {
        let Some(prev) = best[ii] else { continue };
        let lo = cuts[ii];
        let mut states: Vec<BestTupleState> = dirs
            .iter()
            .map(|&d| BestTupleState::with_capacity(spec.delta, d, n - lo))
            .collect();
        let mut non_null = 0usize;
        let mut jj = ii + 1;
        for pos in lo..n {
            if pos & 0x3ff == 0 {
                check_deadline(deadline)?;
            }
            let y = ys[pos];
            non_null += usize::from(y.is_some());
            for st in states.iter_mut() {
                st.push(y);
            }
            if pos + 1 != cuts[jj] {
                continue;
            }
            let segments = prev.segments + 1;
            let mut order: Vec<(i64, usize)> = states
                .iter()
                .enumerate()
                .map(|(k, st)| (2 * st.k_max() as i64 - non_null as i64, k))
                .collect();
            // stable: ascending keeps priority on equal gain
            order.sort_by_key(|e| std::cmp::Reverse(e.0));
            let top = prev.value + order[0].0 * non_null as i64;
            if beats(top, segments, best[jj].as_ref()) {
                for &(gain, k) in &order {
                    let members = states[k].reconstruct();
                    let cost = longest_outlier_run(&ys[lo..=pos], &members);
                    if cost > spec.epsilon {
                        continue;
                    }
                    let value = prev.value + gain * non_null as i64;
                    if beats(value, segments, best[jj].as_ref()) {
                        best[jj] = Some(Best {
                            value,
                            segments,
                            from: ii,
                            dir: states[k].direction(),
                        });
                    }
                    break;
                }
            }
            jj += 1;
        }
    }
    Ok(())
}

/// All split points `0..=n`.
pub fn all_cuts(n: usize) -> Vec<usize> {
    (0..=n).collect()
}

/// Optimal approximate-conditional segmentation over every split point.
pub fn discover_abcod(ys: &[Option<i64>], spec: &BandOdSpec) -> Segmentation {
    discover_abcod_with(ys, spec, DpOptions::default())
        .expect("full split set is always feasible")
        .0
}

pub fn discover_abcod_with(ys: &[Option<i64>], spec: &BandOdSpec, opts: DpOptions) -> Result<(Segmentation, DpTable)> {
    segment_dp(ys, spec, &all_cuts(ys.len()), opts)
}

/// Full DP that gives up at `deadline`.
pub fn discover_abcod_until(
    ys: &[Option<i64>],
    spec: &BandOdSpec,
    strategy: DpStrategy,
    deadline: Instant,
) -> Option<Segmentation> {
    let opts = DpOptions {
        strategy,
        deadline: Some(deadline),
    };
    discover_abcod_with(ys, spec, opts).ok().map(|(s, _)| s)
}
