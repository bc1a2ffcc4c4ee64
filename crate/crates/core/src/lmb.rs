//! Longest monotonic bands in `O(n log n)`.
//!
//! The state keeps, for every band length `k`, the smallest possible last
//! value of a band of that length (the best tuple). A new value extends a
//! contiguous range of lengths `[k1, k2]`, and that range is all the
//! reconstruction needs.

use crate::model::{Direction, Orientation};

/// Best-tuple array plus the per-position length ranges.
///
/// Descending bands run the ascending machinery on negated values, so `b` is
/// always non-decreasing internally; [`BestTupleState::best`] converts back.
#[derive(Debug, Clone)]
pub struct BestTupleState {
    dir: Direction,
    delta: i64,
    // b[0] is the lower sentinel, b[1..] the filled best tuples; slots past the
    // end act as the upper sentinel.
    b: Vec<i64>,
    p: Vec<Option<(usize, usize)>>,
}

impl BestTupleState {
    pub fn new(delta: i64, dir: Direction) -> Self {
        BestTupleState {
            dir,
            delta,
            b: vec![i64::MIN],
            p: Vec::new(),
        }
    }

    pub fn with_capacity(delta: i64, dir: Direction, n: usize) -> Self {
        let mut s = Self::new(delta, dir);
        s.p.reserve(n);
        s
    }

    fn orient(&self, y: i64) -> i64 {
        match self.dir {
            Direction::Asc => y,
            Direction::Desc => y.saturating_neg(),
        }
    }

    pub fn direction(&self) -> Direction {
        self.dir
    }

    /// Longest band length seen so far.
    pub fn k_max(&self) -> usize {
        self.b.len() - 1
    }

    /// Best tuple of bands of length `k` (1-based), if any band that long exists.
    pub fn best(&self, k: usize) -> Option<i64> {
        if k == 0 || k > self.k_max() {
            return None;
        }
        Some(self.orient(self.b[k]))
    }

    /// Length ranges recorded so far, one per pushed position (`None` for nulls).
    pub fn lengths(&self) -> &[Option<(usize, usize)>] {
        &self.p
    }

    /// Smallest band length `k` whose best tuple lies strictly beyond `y` by
    /// more than `slack` (`slack = 0` gives `k1`, `slack = delta` gives `k2`).
    pub fn left_most_position(&self, y: i64, slack: i64) -> usize {
        let bound = self.orient(y).saturating_add(slack);
        1 + self.b[1..].partition_point(|&v| v <= bound)
    }

    /// Feeds the next tuple. Nulls record no lengths and leave `b` untouched.
    pub fn push(&mut self, y: Option<i64>) -> Option<(usize, usize)> {
        let range = y.map(|y| {
            let k1 = self.left_most_position(y, 0);
            let k2 = self.left_most_position(y, self.delta);
            let t = self.orient(y);
            for k in (k1..=k2).rev() {
                let v = self.b[k - 1].max(t);
                if k == self.b.len() {
                    self.b.push(v);
                } else {
                    self.b[k] = v;
                }
            }
            (k1, k2)
        });
        self.p.push(range);
        range
    }

    /// Members (0-based offsets into the pushed values) of one longest band.
    ///
    /// Scans right to left, taking each position whose length range contains
    /// the length still needed.
    pub fn reconstruct(&self) -> Vec<usize> {
        let mut need = self.k_max();
        let mut out = Vec::with_capacity(need);
        for (i, r) in self.p.iter().enumerate().rev() {
            if need == 0 {
                break;
            }
            if let Some((k1, k2)) = *r {
                if k1 <= need && need <= k2 {
                    out.push(i);
                    need -= 1;
                }
            }
        }
        out.reverse();
        out
    }
}

/// A longest monotonic band. Positions are 1-based in the input slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmbResult {
    pub members: Vec<usize>,
    pub length: usize,
    pub direction: Direction,
    pub outliers: Vec<usize>,
}

impl LmbResult {
    fn from_members(ys: &[Option<i64>], members0: Vec<usize>, direction: Direction) -> Self {
        let mut outliers = Vec::with_capacity(ys.len() - members0.len());
        let mut m = members0.iter().peekable();
        for (i, y) in ys.iter().enumerate() {
            if m.peek() == Some(&&i) {
                m.next();
            } else if y.is_some() {
                outliers.push(i + 1);
            }
        }
        LmbResult {
            length: members0.len(),
            members: members0.into_iter().map(|i| i + 1).collect(),
            direction,
            outliers,
        }
    }
}

/// Runs the best-tuple pass over `ys` and returns the final state.
pub fn best_tuple_pass(ys: &[Option<i64>], delta: i64, dir: Direction) -> BestTupleState {
    let mut state = BestTupleState::with_capacity(delta, dir, ys.len());
    for &y in ys {
        state.push(y);
    }
    state
}

/// One longest band in direction `dir`.
pub fn compute_lmb(ys: &[Option<i64>], delta: i64, dir: Direction) -> LmbResult {
    let state = best_tuple_pass(ys, delta, dir);
    LmbResult::from_members(ys, state.reconstruct(), dir)
}

/// The longer of the ascending and descending bands; ties go to ascending.
pub fn compute_lmb_bidirectional(ys: &[Option<i64>], delta: i64) -> LmbResult {
    let asc = compute_lmb(ys, delta, Direction::Asc);
    let desc = compute_lmb(ys, delta, Direction::Desc);
    if desc.length > asc.length {
        desc
    } else {
        asc
    }
}

/// Dispatches on an orientation.
pub fn compute_lmb_oriented(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> LmbResult {
    match orientation {
        Orientation::Asc => compute_lmb(ys, delta, Direction::Asc),
        Orientation::Desc => compute_lmb(ys, delta, Direction::Desc),
        Orientation::Bi => compute_lmb_bidirectional(ys, delta),
    }
}
