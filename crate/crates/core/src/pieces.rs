//! Pre-pieces, pieces, and the segmentation DP restricted to piece boundaries.

use std::collections::VecDeque;

use crate::discovery::{segment_dp, DpOptions, DpTable, Segmentation};
use crate::error::Result;
use crate::model::{BandOdSpec, Direction, Orientation};

/// A maximal contiguous run that is band-monotone in one direction.
/// Positions are 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrePiece {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
}

/// An atom of the pruned DP. Positions are 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Piece {
    pub start: usize,
    pub end: usize,
}

/// Tracks the longest band-monotone run ending at the current position.
struct RunTracker {
    dir: Direction,
    delta: i64,
    start: usize,
    // indices whose oriented values decrease front to back: running maxima
    peaks: VecDeque<(usize, i64)>,
}

impl RunTracker {
    fn new(delta: i64, dir: Direction) -> Self {
        RunTracker {
            dir,
            delta,
            start: 0,
            peaks: VecDeque::new(),
        }
    }

    fn orient(&self, y: i64) -> i64 {
        match self.dir {
            Direction::Asc => y,
            Direction::Desc => y.saturating_neg(),
        }
    }

    fn extends(&self, y: Option<i64>) -> bool {
        match (y, self.peaks.front()) {
            (Some(y), Some(&(_, top))) => self.orient(y) >= top.saturating_sub(self.delta),
            _ => true,
        }
    }

    /// Appends position `j`; returns the run it closed, if it could not extend.
    fn push(&mut self, j: usize, y: Option<i64>) -> Option<(usize, usize)> {
        let closed = (!self.extends(y)).then(|| (self.start, j - 1));
        if let Some(y) = y {
            let v = self.orient(y);
            let bound = v.saturating_add(self.delta);
            while let Some(&(idx, top)) = self.peaks.front() {
                if top > bound {
                    self.start = self.start.max(idx + 1);
                    self.peaks.pop_front();
                } else {
                    break;
                }
            }
            while self.peaks.back().is_some_and(|&(_, b)| b <= v) {
                self.peaks.pop_back();
            }
            self.peaks.push_back((j, v));
        }
        closed
    }
}

fn runs_and_pre_pieces(ys: &[Option<i64>], delta: i64) -> (Vec<PrePiece>, [Vec<(usize, usize)>; 2]) {
    let n = ys.len();
    let mut pre = Vec::new();
    let mut runs: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    if n == 0 {
        return (pre, runs);
    }
    let mut trackers = [
        RunTracker::new(delta, Direction::Asc),
        RunTracker::new(delta, Direction::Desc),
    ];
    for j in 0..=n {
        // longest runs ending at j - 1, before t_j is seen
        let len_before = [j - trackers[0].start, j - trackers[1].start];
        let closed: Vec<Option<(usize, usize)>> = trackers
            .iter_mut()
            .map(|t| {
                if j == n {
                    (j > 0).then_some((t.start, j - 1))
                } else if j == 0 {
                    t.push(0, ys[0]);
                    None
                } else {
                    t.push(j, ys[j])
                }
            })
            .collect();
        for (d, c) in closed.into_iter().enumerate() {
            if let Some((a, b)) = c {
                runs[d].push((a, b));
                if len_before[d] > len_before[1 - d] {
                    pre.push(PrePiece {
                        start: a + 1,
                        end: b + 1,
                        direction: trackers[d].dir,
                    });
                }
            }
        }
    }
    pre.sort();
    (pre, runs)
}

/// Pre-pieces in position order.
///
/// A run is reported when the next tuple cannot extend it and it is strictly
/// longer than the longest opposite-direction run ending at the same place.
/// Nulls extend every run.
pub fn compute_pre_pieces(ys: &[Option<i64>], delta: i64) -> Vec<PrePiece> {
    runs_and_pre_pieces(ys, delta).0
}

fn pieces_from_cuts(cuts: &[usize]) -> Vec<Piece> {
    cuts.windows(2)
        .map(|w| Piece {
            start: w[0] + 1,
            end: w[1],
        })
        .collect()
}

/// Piece boundaries as 0-based cut points, `0` and `n` included.
///
/// For a fixed direction the boundaries of every maximal run in that direction
/// are added, so that each piece is band-monotone in the discovery direction.
pub fn piece_cuts(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Vec<usize> {
    let n = ys.len();
    let (pre, runs) = runs_and_pre_pieces(ys, delta);
    let mut cuts = vec![0, n];
    for p in &pre {
        cuts.push(p.start - 1);
        cuts.push(p.end);
    }
    let extra: &[(usize, usize)] = match orientation {
        Orientation::Asc => &runs[0],
        Orientation::Desc => &runs[1],
        Orientation::Bi => &[],
    };
    for &(a, b) in extra {
        cuts.push(a);
        cuts.push(b + 1);
    }
    cuts.sort_unstable();
    cuts.dedup();
    cuts
}

/// Pieces: the intervals between consecutive pre-piece boundaries.
pub fn compute_pieces(ys: &[Option<i64>], delta: i64) -> Vec<Piece> {
    pieces_from_cuts(&piece_cuts(ys, delta, Orientation::Bi))
}

/// Pieces used by the pruned DP for a given orientation.
pub fn dp_pieces(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Vec<Piece> {
    pieces_from_cuts(&piece_cuts(ys, delta, orientation))
}

/// Segmentation DP whose split points are piece boundaries only.
pub fn discover_abcod_pieces(ys: &[Option<i64>], spec: &BandOdSpec) -> Segmentation {
    discover_abcod_pieces_with(ys, spec, DpOptions::default())
        .expect("piece boundaries always admit a feasible segmentation")
        .0
}

pub fn discover_abcod_pieces_with(
    ys: &[Option<i64>],
    spec: &BandOdSpec,
    opts: DpOptions,
) -> Result<(Segmentation, DpTable)> {
    let cuts = piece_cuts(ys, spec.delta, spec.orientation);
    segment_dp(ys, spec, &cuts, opts)
}
