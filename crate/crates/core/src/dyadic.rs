//! Dyadic rationals `a / 2^k` and the graph on them whose edges join
//! consecutive points of each depth-bounded grid.
//!
//! Two dyadics are adjacent iff they are consecutive among all points of
//! depth at most the larger of their two depths; equivalently, iff their
//! distance is `2^-max(depth)`. Every point set that Bob can build in the
//! game, read in increasing order, is a path in this graph.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Depths above this cannot be cross-scaled inside an `i128` safely.
pub const MAX_DEPTH: u32 = 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DyadicError {
    #[error("depth {0} exceeds the supported maximum {MAX_DEPTH}")]
    DepthOverflow(u32),
    #[error("numerator overflow")]
    NumeratorOverflow,
    #[error("{0} and {1} are not an adjacent increasing pair")]
    NotAdjacentPair(Dyadic, Dyadic),
    #[error("adjacency of a point with itself ({0})")]
    SamePoint(Dyadic),
    #[error("depth bound {bound} is below the depth of {point}")]
    BoundBelowDepth { point: Dyadic, bound: u32 },
    #[error("points are not strictly increasing")]
    NotIncreasing,
    #[error("slot {slot} outside 0..={len}")]
    SlotOutOfRange { slot: usize, len: usize },
    #[error("points {0} and {1} are consecutive but not adjacent")]
    BrokenPath(Dyadic, Dyadic),
}

/// The exact value `num / 2^depth`, kept normalized: `depth == 0` or `num`
/// is odd. Equality is structural, order is numeric.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDyadic")]
pub struct Dyadic {
    num: i64,
    depth: u32,
}

#[derive(Deserialize)]
struct RawDyadic {
    num: i64,
    depth: u32,
}

impl TryFrom<RawDyadic> for Dyadic {
    type Error = DyadicError;

    fn try_from(raw: RawDyadic) -> Result<Self, Self::Error> {
        Dyadic::new(raw.num, raw.depth)
    }
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, depth: 0 };

    /// Normalizes `num / 2^depth`.
    pub fn new(num: i64, depth: u32) -> Result<Dyadic, DyadicError> {
        if depth > MAX_DEPTH {
            return Err(DyadicError::DepthOverflow(depth));
        }
        if num == 0 {
            return Ok(Dyadic::ZERO);
        }
        let shift = num.trailing_zeros().min(depth);
        Ok(Dyadic { num: num >> shift, depth: depth - shift })
    }

    pub fn integer(n: i64) -> Dyadic {
        Dyadic { num: n, depth: 0 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn depth(self) -> u32 {
        self.depth
    }

    pub fn is_integer(self) -> bool {
        self.depth == 0
    }

    /// Numerator at the finer scale `2^depth`; `depth >= self.depth()`.
    fn scaled(self, depth: u32) -> i128 {
        debug_assert!(depth >= self.depth && depth <= MAX_DEPTH);
        (self.num as i128) << (depth - self.depth)
    }

    /// `self + 2^-k`.
    pub fn plus_unit(self, k: u32) -> Result<Dyadic, DyadicError> {
        self.offset(k, 1)
    }

    /// `self - 2^-k`.
    pub fn minus_unit(self, k: u32) -> Result<Dyadic, DyadicError> {
        self.offset(k, -1)
    }

    fn offset(self, k: u32, sign: i128) -> Result<Dyadic, DyadicError> {
        let depth = k.max(self.depth);
        if depth > MAX_DEPTH {
            return Err(DyadicError::DepthOverflow(depth));
        }
        let num = self.scaled(depth) + (sign << (depth - k));
        Dyadic::new(i64::try_from(num).map_err(|_| DyadicError::NumeratorOverflow)?, depth)
    }

    /// Integer closest to `self` in the given direction, for extending the
    /// board past an integer extreme.
    pub fn step_integer(self, up: bool) -> Result<Dyadic, DyadicError> {
        debug_assert!(self.is_integer());
        let num = if up { self.num.checked_add(1) } else { self.num.checked_sub(1) };
        num.map(Dyadic::integer).ok_or(DyadicError::NumeratorOverflow)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (2f64).powi(self.depth as i32)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.depth.max(other.depth);
        self.scaled(d).cmp(&other.scaled(d))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.depth)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether `u` and `v` are joined in the graph: `|u - v| = 2^-max(depth)`.
pub fn adjacent(u: Dyadic, v: Dyadic) -> Result<bool, DyadicError> {
    if u == v {
        return Err(DyadicError::SamePoint(u));
    }
    let d = u.depth.max(v.depth);
    Ok((u.scaled(d) - v.scaled(d)).abs() == 1)
}

/// Adjacency straight from the grid definition: no dyadic of depth at most
/// `max(depth(u), depth(v))` lies strictly between the two points. Walks
/// every grid level and compares through [`Ord`]; kept as a check on
/// [`adjacent`].
pub fn adjacent_definitional(u: Dyadic, v: Dyadic) -> Result<bool, DyadicError> {
    if u == v {
        return Err(DyadicError::SamePoint(u));
    }
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    let bound = u.depth.max(v.depth);
    for k in 0..=bound {
        let first = floor_at_scale(lo, k);
        let last = floor_at_scale(hi, k) + 1;
        for a in first..=last {
            let x = Dyadic::new(a, k)?;
            if lo < x && x < hi {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `floor(x * 2^k)`.
fn floor_at_scale(x: Dyadic, k: u32) -> i64 {
    if k >= x.depth {
        x.num << (k - x.depth)
    } else {
        x.num >> (x.depth - k)
    }
}

/// The exact middle of an adjacent increasing pair; one level deeper than
/// the deeper endpoint.
pub fn midpoint(u: Dyadic, v: Dyadic) -> Result<Dyadic, DyadicError> {
    if u >= v || !adjacent(u, v)? {
        return Err(DyadicError::NotAdjacentPair(u, v));
    }
    let d = u.depth.max(v.depth);
    if d + 1 > MAX_DEPTH {
        return Err(DyadicError::DepthOverflow(d + 1));
    }
    let sum = u.scaled(d) + v.scaled(d);
    let m = Dyadic::new(i64::try_from(sum).map_err(|_| DyadicError::NumeratorOverflow)?, d + 1)?;
    debug_assert_eq!(m.depth, d + 1);
    Ok(m)
}

/// All neighbours above `x` of depth at most `bound`, ascending:
/// `x + 2^-k` for `depth(x) <= k <= bound`.
pub fn upper_neighbors(x: Dyadic, bound: u32) -> Result<Vec<Dyadic>, DyadicError> {
    if bound < x.depth {
        return Err(DyadicError::BoundBelowDepth { point: x, bound });
    }
    let mut out = (x.depth..=bound).rev().map(|k| x.plus_unit(k)).collect::<Result<Vec<_>, _>>()?;
    out.dedup();
    Ok(out)
}

/// Mirror of [`upper_neighbors`], ascending.
pub fn lower_neighbors(x: Dyadic, bound: u32) -> Result<Vec<Dyadic>, DyadicError> {
    if bound < x.depth {
        return Err(DyadicError::BoundBelowDepth { point: x, bound });
    }
    let mut out = (x.depth..=bound).map(|k| x.minus_unit(k)).collect::<Result<Vec<_>, _>>()?;
    out.dedup();
    Ok(out)
}

/// Whether a strictly increasing list of points walks along edges only.
pub fn is_monotone_path(points: &[Dyadic]) -> Result<bool, DyadicError> {
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DyadicError::NotIncreasing);
    }
    for w in points.windows(2) {
        if !adjacent(w[0], w[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The finite piece of the graph on `[-range, range]` with depth at most
/// `max_depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub range: u32,
    pub max_depth: u32,
}

impl Truncation {
    pub fn new(range: u32, max_depth: u32) -> Result<Truncation, DyadicError> {
        if max_depth > MAX_DEPTH - 2 {
            return Err(DyadicError::DepthOverflow(max_depth));
        }
        let span = (range as i128) << max_depth;
        if span > i64::MAX as i128 / 2 {
            return Err(DyadicError::NumeratorOverflow);
        }
        Ok(Truncation { range, max_depth })
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.range as usize * (1usize << self.max_depth) + 1
    }

    pub fn contains(&self, x: Dyadic) -> bool {
        x.depth <= self.max_depth && x.num.unsigned_abs() <= (self.range as u64) << x.depth
    }

    /// Vertices in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = Dyadic> + '_ {
        let span = (self.range as i64) << self.max_depth;
        (-span..=span).map(move |a| Dyadic::new(a, self.max_depth).expect("checked in new"))
    }

    /// Edges `(u, v)` with `u < v`, grouped by `u` ascending.
    pub fn edges(&self) -> Vec<(Dyadic, Dyadic)> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for v in upper_neighbors(u, self.max_depth).expect("depth within bound") {
                if self.contains(v) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// The position Bob's slot resolves to on a board with sorted `points`:
/// `0` on the empty board, one integer step past an extreme, otherwise the
/// midpoint of the two neighbours of the slot.
pub fn resolve_slot(points: &[Dyadic], slot: usize) -> Result<Dyadic, DyadicError> {
    let n = points.len();
    if slot > n {
        return Err(DyadicError::SlotOutOfRange { slot, len: n });
    }
    if n == 0 {
        return Ok(Dyadic::ZERO);
    }
    if slot == 0 {
        return points[0].step_integer(false);
    }
    if slot == n {
        return points[n - 1].step_integer(true);
    }
    let (u, v) = (points[slot - 1], points[slot]);
    midpoint(u, v).map_err(|e| match e {
        DyadicError::NotAdjacentPair(a, b) => DyadicError::BrokenPath(a, b),
        other => other,
    })
}

/// Every point set reachable in at most `rounds` Bob moves, by size.
/// `levels[r]` holds the sets of size `r`, each sorted ascending, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct ReachableSets {
    levels: Vec<Vec<Vec<Dyadic>>>,
}

impl ReachableSets {
    pub fn build(rounds: usize) -> Result<ReachableSets, DyadicError> {
        let mut levels: Vec<Vec<Vec<Dyadic>>> = vec![vec![Vec::new()]];
        for _ in 0..rounds {
            let prev = levels.last().expect("nonempty");
            let mut next: FxHashSet<Vec<Dyadic>> = FxHashSet::default();
            for set in prev {
                for slot in 0..=set.len() {
                    let x = resolve_slot(set, slot)?;
                    let mut child = Vec::with_capacity(set.len() + 1);
                    child.extend_from_slice(&set[..slot]);
                    child.push(x);
                    child.extend_from_slice(&set[slot..]);
                    next.insert(child);
                }
            }
            let mut next: Vec<_> = next.into_iter().collect();
            next.sort();
            levels.push(next);
        }
        Ok(ReachableSets { levels })
    }

    pub fn rounds(&self) -> usize {
        self.levels.len() - 1
    }

    /// Sets of exactly `size` points.
    pub fn level(&self, size: usize) -> &[Vec<Dyadic>] {
        self.levels.get(size).map_or(&[], |l| l.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Dyadic>> {
        self.levels.iter().flatten()
    }

    pub fn set_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn positions(&self) -> BTreeSet<Dyadic> {
        self.iter().flatten().copied().collect()
    }
}

/// Every position occurring in some Bob move sequence of length at most
/// `rounds`; Bob's first point is always `0`.
pub fn reachable_positions(rounds: usize) -> Result<BTreeSet<Dyadic>, DyadicError> {
    Ok(ReachableSets::build(rounds)?.positions())
}
