//! Brute-force references, written straight from the definitions.
//!
//! Nothing here shares code with the production algorithms beyond the band
//! order operator. Every entry point refuses inputs past a hard size cap.

use crate::error::{Error, Result};
use crate::model::{band_leq, Direction, OrderedValue, Orientation};

/// Inputs longer than this are refused by the enumerating oracles.
pub const ENUMERATION_LIMIT: usize = 12;
/// Inputs longer than this are refused by the polynomial oracle.
pub const DP_LIMIT: usize = 20;

fn cap(operation: &'static str, len: usize, limit: usize) -> Result<()> {
    if len > limit {
        Err(Error::SizeLimit { operation, len, limit })
    } else {
        Ok(())
    }
}

fn ov(y: Option<i64>) -> OrderedValue {
    OrderedValue(y)
}

/// Every in-order pair of `ys` satisfies the band operator (nulls ignored).
pub fn is_band(ys: &[Option<i64>], delta: i64, dir: Direction) -> bool {
    (0..ys.len()).all(|a| (a + 1..ys.len()).all(|b| band_leq(ov(ys[a]), ov(ys[b]), delta, dir)))
}

/// Largest band in `dir`, ties resolved towards the member list that is
/// greatest when read from the right. Members are 0-based.
fn canonical_band(ys: &[Option<i64>], delta: i64, dir: Direction) -> Vec<usize> {
    fn dfs(
        ys: &[Option<i64>],
        delta: i64,
        dir: Direction,
        pos: usize,
        chosen: &mut Vec<usize>,
        remaining: &[usize],
        best: &mut Option<Vec<usize>>,
    ) {
        let reach = chosen.len() + remaining[pos];
        if let Some(b) = best {
            // equal size found earlier already wins the tie
            if reach <= b.len() {
                return;
            }
        }
        if pos == 0 {
            *best = Some(chosen.iter().rev().copied().collect());
            return;
        }
        let i = pos - 1;
        if ys[i].is_some() {
            let fits = chosen
                .iter()
                .all(|&later| band_leq(ov(ys[i]), ov(ys[later]), delta, dir));
            if fits {
                chosen.push(i);
                dfs(ys, delta, dir, i, chosen, remaining, best);
                chosen.pop();
            }
        }
        dfs(ys, delta, dir, i, chosen, remaining, best);
    }
    // remaining[p] = non-null positions among 0..p
    let mut remaining = vec![0; ys.len() + 1];
    for i in 0..ys.len() {
        remaining[i + 1] = remaining[i] + usize::from(ys[i].is_some());
    }
    let mut best = None;
    dfs(ys, delta, dir, ys.len(), &mut Vec::new(), &remaining, &mut best);
    best.unwrap_or_default()
}

/// Length and one witness (1-based) of a longest band, by enumeration.
pub fn brute_lmb(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Result<(usize, Vec<usize>, Direction)> {
    cap("brute_lmb", ys.len(), ENUMERATION_LIMIT)?;
    let mut best: Option<(Vec<usize>, Direction)> = None;
    for &dir in orientation.directions() {
        let band = canonical_band(ys, delta, dir);
        if best.as_ref().is_none_or(|(b, _)| band.len() > b.len()) {
            best = Some((band, dir));
        }
    }
    let (band, dir) = best.expect("at least one direction");
    Ok((band.len(), band.into_iter().map(|i| i + 1).collect(), dir))
}

/// Longest band length by a DP over (last member, largest member so far).
pub fn dp_lmb_length(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Result<usize> {
    cap("dp_lmb_length", ys.len(), DP_LIMIT)?;
    let n = ys.len();
    let mut overall = 0;
    for &dir in orientation.directions() {
        let key = |i: usize| -> i64 {
            let v = ys[i].expect("non-null");
            if dir == Direction::Asc {
                v
            } else {
                -v
            }
        };
        // len[i][m]: longest band ending at i whose extreme member is m
        let mut len = vec![vec![0usize; n]; n];
        for i in 0..n {
            if ys[i].is_none() {
                continue;
            }
            len[i][i] = 1;
            for last in 0..i {
                for m in 0..=last {
                    if len[last][m] == 0 || key(i) < key(m) - delta {
                        continue;
                    }
                    let nm = if key(i) > key(m) { i } else { m };
                    len[i][nm] = len[i][nm].max(len[last][m] + 1);
                }
            }
        }
        let best = len.iter().flatten().copied().max().unwrap_or(0);
        overall = overall.max(best);
    }
    Ok(overall)
}

struct RangeScore {
    weighted: i64,
}

fn range_score(ys: &[Option<i64>], delta: i64, epsilon: usize, orientation: Orientation) -> Option<RangeScore> {
    let non_null = ys.iter().filter(|y| y.is_some()).count() as i64;
    let mut best: Option<i64> = None;
    for &dir in orientation.directions() {
        let band = canonical_band(ys, delta, dir);
        let members = band.len() as i64;
        let gain = members - (non_null - members);
        let mut run = 0;
        let mut cost = 0;
        for (i, y) in ys.iter().enumerate() {
            if band.contains(&i) {
                run = 0;
            } else if y.is_some() {
                run += 1;
                cost = cost.max(run);
            }
        }
        if cost <= epsilon && best.is_none_or(|b| gain > b) {
            best = Some(gain);
        }
    }
    best.map(|g| RangeScore { weighted: g * non_null })
}

/// Maximum total weighted gain over all `2^(n-1)` segmentations whose
/// segments all respect the error budget.
#[allow(clippy::needless_range_loop)]
pub fn brute_segmentation(ys: &[Option<i64>], delta: i64, epsilon: usize, orientation: Orientation) -> Result<i64> {
    cap("brute_segmentation", ys.len(), ENUMERATION_LIMIT)?;
    let n = ys.len();
    if n == 0 {
        return Ok(0);
    }
    let mut score = vec![vec![None; n + 1]; n + 1];
    for i in 0..n {
        for j in i + 1..=n {
            score[i][j] = range_score(&ys[i..j], delta, epsilon, orientation).map(|s| s.weighted);
        }
    }
    let mut best: Option<i64> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut total = 0;
        let mut start = 0;
        let mut ok = true;
        for end in 1..=n {
            if end == n || mask & (1 << (end - 1)) != 0 {
                match score[start][end] {
                    Some(s) => total += s,
                    None => {
                        ok = false;
                        break;
                    }
                }
                start = end;
            }
        }
        if ok && best.is_none_or(|b| total > b) {
            best = Some(total);
        }
    }
    Ok(best.expect("singleton segments are always feasible"))
}

/// Fewest segments such that the band OD holds exactly on each one.
pub fn brute_min_bcod_segments(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Result<usize> {
    cap("brute_min_bcod_segments", ys.len(), ENUMERATION_LIMIT)?;
    let n = ys.len();
    if n == 0 {
        return Ok(0);
    }
    let ok = |a: usize, b: usize| orientation.directions().iter().any(|&d| is_band(&ys[a..b], delta, d));
    let mut best = usize::MAX;
    for mask in 0u32..(1 << (n - 1)) {
        let mut start = 0;
        let mut count = 0;
        let mut valid = true;
        for end in 1..=n {
            if end == n || mask & (1 << (end - 1)) != 0 {
                if !ok(start, end) {
                    valid = false;
                    break;
                }
                count += 1;
                start = end;
            }
        }
        if valid {
            best = best.min(count);
        }
    }
    Ok(best)
}

/// `T[a, b]` (1-based, inclusive) is a band in `dir` that cannot grow by one
/// position on either side.
pub fn is_maximal_run(ys: &[Option<i64>], a: usize, b: usize, delta: i64, dir: Direction) -> bool {
    is_band(&ys[a - 1..b], delta, dir)
        && (a == 1 || !is_band(&ys[a - 2..b], delta, dir))
        && (b == ys.len() || !is_band(&ys[a - 1..b + 1], delta, dir))
}
