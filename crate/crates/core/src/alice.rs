//! Alice's side of the game: colorings of position sets together with the
//! search that finds them and the checks that certify them.
//!
//! A coloring is *monotone-safe* on a domain when every strictly increasing
//! path in the graph induced on the domain carries a square-free color
//! word. Any point set Bob can build is such a path, so a monotone-safe
//! table is a winning strategy as long as Bob stays inside the domain.
//! [`verify_reachable`] checks the weaker game-exact condition directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{self, Dyadic, DyadicError};
use crate::game::{AliceStrategy, GameState, StrategyError};
use crate::words::{self, Repetition, Symbol, MAX_ALPHABET};

/// Number of colors that always suffice for the graph's finite pieces.
pub const SUFFICIENT_COLORS: u8 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("color count {0} outside 1..={MAX_ALPHABET}")]
    InvalidColorCount(usize),
    #[error("color {color} at {position} is not below {count}")]
    ColorOutOfRange { position: Dyadic, color: Symbol, count: u8 },
    #[error("{0} lies outside the coloring's domain")]
    OutsideDomain(Dyadic),
    #[error("domain misses {missing} reachable positions, first {first}")]
    DomainTooSmall { missing: usize, first: Dyadic },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no coloring with at most {0} colors was found")]
    NotFound(u8),
    #[error("table loses on {points:?}: word {word:?} has square {repetition:?}")]
    Unverified { points: Vec<Dyadic>, word: Vec<Symbol>, repetition: Repetition },
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

/// A total map from a finite set of positions to colors `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: BTreeMap<Dyadic, Symbol>,
    count: u8,
}

impl Coloring {
    pub fn new(count: u8, colors: BTreeMap<Dyadic, Symbol>) -> Result<Coloring, ColoringError> {
        if count == 0 || count > MAX_ALPHABET {
            return Err(ColoringError::InvalidColorCount(count as usize));
        }
        if let Some((&position, &color)) = colors.iter().find(|&(_, &c)| c >= count) {
            return Err(ColoringError::ColorOutOfRange { position, color, count });
        }
        Ok(Coloring { colors, count })
    }

    pub fn count(&self) -> u8 {
        self.count
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, position: Dyadic) -> Option<Symbol> {
        self.colors.get(&position).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = Dyadic> + '_ {
        self.colors.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dyadic, Symbol)> + '_ {
        self.colors.iter().map(|(&p, &c)| (p, c))
    }

    /// Applies the color permutation `perm` (`perm[old] = new`).
    pub fn renamed(&self, perm: &[Symbol]) -> Coloring {
        Coloring { colors: self.colors.iter().map(|(&p, &c)| (p, perm[c as usize])).collect(), count: self.count }
    }

    /// Text form: `colors=<c>` then `num depth color` per position, sorted
    /// by value.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("colors={}\n", self.count);
        for (p, c) in self.iter() {
            writeln!(out, "{} {} {}", p.num(), p.depth(), c).expect("write to string");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Coloring, ColoringError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ColoringError::Parse { line: 1, message: "empty file".into() })?;
        let count = header
            .trim()
            .strip_prefix("colors=")
            .and_then(|v| v.parse::<u8>().ok())
            .ok_or(ColoringError::Parse { line: 1, message: format!("expected colors=<c>, got {header:?}") })?;
        let mut colors = BTreeMap::new();
        for (i, line) in lines {
            let bad = |message: String| ColoringError::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [num, depth, color] = fields[..] else {
                return Err(bad(format!("expected `num depth color`, got {line:?}")));
            };
            let num: i64 = num.parse().map_err(|e| bad(format!("numerator: {e}")))?;
            let depth: u32 = depth.parse().map_err(|e| bad(format!("depth: {e}")))?;
            let color: Symbol = color.parse().map_err(|e| bad(format!("color: {e}")))?;
            let position = Dyadic::new(num, depth)?;
            if position.num() != num || position.depth() != depth {
                return Err(bad(format!("{num}/2^{depth} is not normalized")));
            }
            if colors.insert(position, color).is_some() {
                return Err(bad(format!("duplicate position {position}")));
            }
        }
        Coloring::new(count, colors)
    }
}

/// Alice's answer under a coloring table: the precomputed color.
pub fn coloring_strategy_next(coloring: &Coloring, position: Dyadic) -> Result<Symbol, ColoringError> {
    coloring.get(position).ok_or(ColoringError::OutsideDomain(position))
}

/// The least color that can be placed at `position` without a square, if
/// any. `position` must be the one pending (or about to be) on `state`.
pub fn greedy_next(state: &GameState, position: Dyadic) -> Option<Symbol> {
    let index = state.points().partition_point(|&(p, _)| p < position);
    let word = state.word_of();
    let mut buf = Vec::with_capacity(word.len() + 1);
    (0..state.q()).find(|&c| words::insertion_is_safe(word.as_slice(), index, c, &mut buf))
}

/// How Alice is played.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    /// Table lookup, certified for Bob sequences of at most `rounds` moves.
    Coloring {
        coloring: Coloring,
        rounds: usize,
    },
    Greedy,
    External,
}

impl StrategySpec {
    /// A coloring strategy must cover every position reachable within its
    /// certified round count.
    pub fn validate(&self) -> Result<(), ColoringError> {
        if let StrategySpec::Coloring { coloring, rounds } = self {
            check_covers(coloring, &dyadic::reachable_positions(*rounds)?)?;
        }
        Ok(())
    }
}

fn check_covers(coloring: &Coloring, needed: &BTreeSet<Dyadic>) -> Result<(), ColoringError> {
    let mut missing = needed.iter().filter(|p| coloring.get(**p).is_none());
    match missing.next() {
        Some(&first) => Err(ColoringError::DomainTooSmall { missing: 1 + missing.count(), first }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct ColoringAlice {
    coloring: Coloring,
}

impl ColoringAlice {
    pub fn new(coloring: Coloring) -> Self {
        ColoringAlice { coloring }
    }
}

impl AliceStrategy for ColoringAlice {
    fn name(&self) -> &str {
        "coloring"
    }

    fn choose_color(&mut self, _state: &GameState, position: Dyadic) -> Result<Symbol, StrategyError> {
        coloring_strategy_next(&self.coloring, position).map_err(|e| StrategyError(e.to_string()))
    }
}

/// Plays [`greedy_next`]; when every color loses it plays `0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyAlice;

impl AliceStrategy for GreedyAlice {
    fn name(&self) -> &str {
        "greedy"
    }

    fn choose_color(&mut self, state: &GameState, position: Dyadic) -> Result<Symbol, StrategyError> {
        Ok(greedy_next(state, position).unwrap_or(0))
    }
}

/// A monotone path whose color word holds `repetition`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathViolation {
    pub path: Vec<Dyadic>,
    pub word: Vec<Symbol>,
    pub repetition: Repetition,
}

/// The graph induced on a finite domain, vertices in increasing order.
#[derive(Debug, Clone)]
pub struct DomainGraph {
    vertices: Vec<Dyadic>,
    index: FxHashMap<Dyadic, u32>,
    up: Vec<Vec<u32>>,
    adjacency: Vec<bool>,
}

impl DomainGraph {
    pub fn new<I: IntoIterator<Item = Dyadic>>(domain: I) -> Result<DomainGraph, DyadicError> {
        let vertices: Vec<Dyadic> = domain.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let n = vertices.len();
        let index: FxHashMap<Dyadic, u32> = vertices.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let bound = vertices.iter().map(|v| v.depth()).max().unwrap_or(0);
        let mut up = Vec::with_capacity(n);
        let mut adjacency = vec![false; n * n];
        for (i, &x) in vertices.iter().enumerate() {
            let ups: Vec<u32> =
                dyadic::upper_neighbors(x, bound)?.into_iter().filter_map(|v| index.get(&v).copied()).collect();
            for &j in &ups {
                adjacency[i * n + j as usize] = true;
                adjacency[j as usize * n + i] = true;
            }
            up.push(ups);
        }
        Ok(DomainGraph { vertices, index, up, adjacency })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Dyadic] {
        &self.vertices
    }

    pub fn index_of(&self, x: Dyadic) -> Option<usize> {
        self.index.get(&x).map(|&i| i as usize)
    }

    /// Neighbours above vertex `i`, ascending.
    pub fn up(&self, i: usize) -> &[u32] {
        &self.up[i]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.len() + j]
    }

    fn colors_of(&self, coloring: &Coloring) -> Result<Vec<Symbol>, ColoringError> {
        self.vertices.iter().map(|&v| coloring.get(v).ok_or(ColoringError::OutsideDomain(v))).collect()
    }
}

const UNCOLORED: Symbol = Symbol::MAX;

/// Depth-first walk over every increasing path of the domain, extending
/// one vertex at a time and stopping at the first path whose color word
/// ends in a square. Exponential in the domain's depth; intended for small
/// domains.
pub fn verify_monotone_paths(
    domain: &BTreeSet<Dyadic>,
    coloring: &Coloring,
) -> Result<Option<PathViolation>, ColoringError> {
    let graph = DomainGraph::new(domain.iter().copied())?;
    let colors = graph.colors_of(coloring)?;
    let mut path: Vec<u32> = Vec::new();
    let mut word: Vec<Symbol> = Vec::new();
    for start in 0..graph.len() {
        path.push(start as u32);
        word.push(colors[start]);
        if let Some(v) = dfs_paths(&graph, &colors, &mut path, &mut word) {
            return Ok(Some(v));
        }
        path.pop();
        word.pop();
    }
    Ok(None)
}

fn dfs_paths(
    graph: &DomainGraph,
    colors: &[Symbol],
    path: &mut Vec<u32>,
    word: &mut Vec<Symbol>,
) -> Option<PathViolation> {
    let last = *path.last().expect("nonempty path") as usize;
    for &next in graph.up(last) {
        path.push(next);
        word.push(colors[next as usize]);
        if let Some(repetition) = words::square_covering(word, word.len() - 1) {
            return Some(PathViolation {
                path: path.iter().map(|&i| graph.vertices[i as usize]).collect(),
                word: word.clone(),
                repetition,
            });
        }
        if let Some(v) = dfs_paths(graph, colors, path, word) {
            return Some(v);
        }
        path.pop();
        word.pop();
    }
    None
}

/// Polynomial search for a square on an increasing path.
///
/// A square on a path is two equal-colored increasing walks `a_1..a_t` and
/// `b_1..b_t` with `a_t` adjacent to `b_1`. For each `b_1` the walks are
/// grown in lockstep over pairs `(a_j, b_j)` of equal color, so the work is
/// bounded by the number of such pairs rather than the number of paths.
/// Vertices colored [`UNCOLORED`] are ignored; with `through` set, only
/// squares using that vertex are reported.
pub(crate) struct SquareFinder<'g> {
    graph: &'g DomainGraph,
    stamp: Vec<u32>,
    parent: Vec<u32>,
    epoch: u32,
    frontier: Vec<(u32, u32, bool)>,
    next: Vec<(u32, u32, bool)>,
}

const NO_PARENT: u32 = u32::MAX;

impl<'g> SquareFinder<'g> {
    pub(crate) fn new(graph: &'g DomainGraph) -> Self {
        let n = graph.len();
        SquareFinder {
            graph,
            stamp: vec![0; 2 * n * n],
            parent: vec![NO_PARENT; 2 * n * n],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn key(&self, u: u32, v: u32, flag: bool) -> usize {
        let n = self.graph.len();
        (flag as usize * n + u as usize) * n + v as usize
    }

    /// Marks `(u, v, flag)` seen; false if it already was.
    fn visit(&mut self, u: u32, v: u32, flag: bool, parent: u32) -> bool {
        let k = self.key(u, v, flag);
        if self.stamp[k] == self.epoch {
            return false;
        }
        self.stamp[k] = self.epoch;
        self.parent[k] = parent;
        true
    }

    fn new_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// Returns the path indices of the first square found.
    pub(crate) fn find(&mut self, colors: &[Symbol], through: Option<u32>) -> Option<(Vec<u32>, usize)> {
        let graph = self.graph;
        let n = graph.len() as u32;
        for b in 0..n {
            let cb = colors[b as usize];
            if cb == UNCOLORED {
                continue;
            }
            self.new_epoch();
            self.frontier.clear();
            for a in 0..b {
                if colors[a as usize] != cb {
                    continue;
                }
                let flag = through.is_none_or(|x| a == x || b == x);
                if self.prunable(a, b, flag, through) {
                    continue;
                }
                if self.visit(a, b, flag, NO_PARENT) {
                    self.frontier.push((a, b, flag));
                }
            }
            let mut size = 1;
            while !self.frontier.is_empty() {
                for &(u, v, flag) in &self.frontier {
                    if flag && graph.adjacent(u as usize, b as usize) {
                        return Some((self.reconstruct(u, v, flag, b), size));
                    }
                }
                self.next.clear();
                let frontier = std::mem::take(&mut self.frontier);
                for &(u, v, flag) in &frontier {
                    let parent = self.key(u, v, flag) as u32;
                    for &u2 in graph.up(u as usize) {
                        if u2 >= b {
                            break;
                        }
                        let cu = colors[u2 as usize];
                        if cu == UNCOLORED {
                            continue;
                        }
                        for &v2 in graph.up(v as usize) {
                            if colors[v2 as usize] != cu {
                                continue;
                            }
                            let flag2 = flag || through.is_some_and(|x| u2 == x || v2 == x);
                            if self.prunable(u2, v2, flag2, through) {
                                continue;
                            }
                            if self.visit(u2, v2, flag2, parent) {
                                self.next.push((u2, v2, flag2));
                            }
                        }
                    }
                }
                self.frontier = frontier;
                std::mem::swap(&mut self.frontier, &mut self.next);
                size += 1;
            }
        }
        None
    }

    /// A state that has not used `through` and has moved past it never will.
    fn prunable(&self, u: u32, v: u32, flag: bool, through: Option<u32>) -> bool {
        match through {
            Some(x) if !flag => u > x && v > x,
            _ => false,
        }
    }

    fn reconstruct(&self, u: u32, v: u32, flag: bool, b: u32) -> Vec<u32> {
        let n = self.graph.len() as u32;
        let mut firsts = Vec::new();
        let mut seconds = Vec::new();
        let mut k = self.key(u, v, flag) as u32;
        loop {
            let flag_part = k / (n * n);
            let rest = k - flag_part * n * n;
            firsts.push(rest / n);
            seconds.push(rest % n);
            let p = self.parent[k as usize];
            if p == NO_PARENT {
                break;
            }
            k = p;
        }
        firsts.reverse();
        seconds.reverse();
        debug_assert_eq!(seconds[0], b);
        firsts.extend(seconds);
        firsts
    }
}

/// [`verify_monotone_paths`] by the lockstep pair search; polynomial in the
/// domain size. Reports a violating path, not necessarily the one the
/// depth-first walk would find first.
pub fn find_monotone_square(
    domain: &BTreeSet<Dyadic>,
    coloring: &Coloring,
) -> Result<Option<PathViolation>, ColoringError> {
    let graph = DomainGraph::new(domain.iter().copied())?;
    let colors = graph.colors_of(coloring)?;
    let mut finder = SquareFinder::new(&graph);
    Ok(finder.find(&colors, None).map(|(path, size)| {
        let word: Vec<Symbol> = path.iter().map(|&i| colors[i as usize]).collect();
        PathViolation {
            path: path.iter().map(|&i| graph.vertices[i as usize]).collect(),
            word,
            repetition: Repetition { start: 0, size },
        }
    }))
}

/// Outcome of a bounded coloring search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Coloring),
    /// The search space was exhausted: no coloring exists.
    Impossible,
    /// The node limit was hit first.
    GaveUp {
        nodes: u64,
    },
}

/// Backtracking search for a monotone-safe coloring with `count` colors.
///
/// Vertices are colored by increasing depth, then value; colors are tried
/// in increasing order and a vertex may open at most one new color, which
/// loses nothing since renaming colors preserves safety. After each
/// tentative color only squares through the new vertex are looked for.
/// `None` is a proof that no such coloring exists.
pub fn search_coloring(domain: &BTreeSet<Dyadic>, count: u8) -> Result<Option<Coloring>, ColoringError> {
    match search_coloring_bounded(domain, count, u64::MAX)? {
        SearchOutcome::Found(c) => Ok(Some(c)),
        SearchOutcome::Impossible => Ok(None),
        SearchOutcome::GaveUp { .. } => unreachable!("unbounded search"),
    }
}

pub fn search_coloring_bounded(
    domain: &BTreeSet<Dyadic>,
    count: u8,
    max_nodes: u64,
) -> Result<SearchOutcome, ColoringError> {
    if count == 0 || count > MAX_ALPHABET {
        return Err(ColoringError::InvalidColorCount(count as usize));
    }
    let graph = DomainGraph::new(domain.iter().copied())?;
    let n = graph.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&i| (graph.vertices[i as usize].depth(), graph.vertices[i as usize]));

    let mut colors = vec![UNCOLORED; n];
    // opened[k] = number of distinct colors used by order[..k]
    let mut opened = vec![0u8; n + 1];
    let mut finder = SquareFinder::new(&graph);
    let mut nodes = 0u64;
    let mut k = 0usize;
    let mut next_try = vec![0u8; n];
    while k < n {
        let x = order[k];
        let limit = (opened[k] + 1).min(count);
        let mut placed = false;
        while next_try[k] < limit {
            let c = next_try[k];
            next_try[k] += 1;
            nodes += 1;
            if nodes > max_nodes {
                return Ok(SearchOutcome::GaveUp { nodes });
            }
            colors[x as usize] = c;
            if finder.find(&colors, Some(x)).is_none() {
                opened[k + 1] = opened[k].max(c + 1);
                placed = true;
                break;
            }
        }
        if placed {
            k += 1;
            if k < n {
                next_try[k] = 0;
            }
        } else {
            colors[x as usize] = UNCOLORED;
            if k == 0 {
                return Ok(SearchOutcome::Impossible);
            }
            k -= 1;
        }
    }
    let map = graph.vertices.iter().zip(&colors).map(|(&v, &c)| (v, c)).collect();
    Ok(SearchOutcome::Found(Coloring::new(count, map)?))
}

/// A reachable board whose color word has a square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachableViolation {
    pub points: Vec<Dyadic>,
    pub word: Vec<Symbol>,
    pub repetition: Repetition,
}

/// Checks every point set Bob can build in at most `rounds` moves.
///
/// The sets are expanded level by level and deduplicated, which is sound
/// because every prefix of a Bob sequence is itself a reachable board.
/// `None` means table-Alice survives every Bob sequence of that length.
pub fn verify_reachable(rounds: usize, coloring: &Coloring) -> Result<Option<ReachableViolation>, ColoringError> {
    check_covers(coloring, &dyadic::reachable_positions(rounds)?)?;
    let mut level: Vec<(Vec<Dyadic>, Vec<Symbol>)> = vec![(Vec::new(), Vec::new())];
    let mut buf = Vec::new();
    for _ in 0..rounds {
        let mut seen: FxHashSet<Vec<Dyadic>> = FxHashSet::default();
        let mut next = Vec::new();
        for (points, word) in &level {
            for slot in 0..=points.len() {
                let x = dyadic::resolve_slot(points, slot)?;
                let color = coloring_strategy_next(coloring, x)?;
                let mut child = points.clone();
                child.insert(slot, x);
                if !words::insertion_is_safe(word, slot, color, &mut buf) {
                    let mut child_word = word.clone();
                    child_word.insert(slot, color);
                    let repetition = words::square_covering(&child_word, slot).expect("unsafe insertion");
                    return Ok(Some(ReachableViolation { points: child, word: child_word, repetition }));
                }
                if seen.insert(child.clone()) {
                    let mut child_word = word.clone();
                    child_word.insert(slot, color);
                    next.push((child, child_word));
                }
            }
        }
        next.sort();
        level = next;
    }
    Ok(None)
}

/// Searches a `colors`-coloring of every position reachable in `rounds`
/// moves and certifies it with [`verify_reachable`] before returning it.
pub fn prepare(rounds: usize, colors: u8) -> Result<Coloring, ColoringError> {
    let domain = dyadic::reachable_positions(rounds)?;
    let coloring = search_coloring(&domain, colors)?.ok_or(ColoringError::NotFound(colors))?;
    match verify_reachable(rounds, &coloring)? {
        None => Ok(coloring),
        Some(v) => Err(ColoringError::Unverified { points: v.points, word: v.word, repetition: v.repetition }),
    }
}

/// The fewest colors admitting a monotone-safe coloring of `domain`, with a
/// witness, trying `1..=12` in turn.
pub fn min_colors(domain: &BTreeSet<Dyadic>) -> Result<(u8, Coloring), ColoringError> {
    for c in 1..=SUFFICIENT_COLORS {
        if let Some(coloring) = search_coloring(domain, c)? {
            return Ok((c, coloring));
        }
    }
    Err(ColoringError::NotFound(SUFFICIENT_COLORS))
}

/// Result of [`min_colors_bounded`]: the minimum lies in `lower..=upper`,
/// with `witness` using `upper` colors (or nothing when no count up to 12
/// was settled in time).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinColors {
    pub lower: u8,
    pub upper: Option<u8>,
    pub witness: Option<Coloring>,
}

impl MinColors {
    pub fn exact(&self) -> Option<u8> {
        self.upper.filter(|&u| u == self.lower)
    }
}

/// [`min_colors`] with every search capped at `max_nodes`; a capped count
/// stays open instead of being refuted.
pub fn min_colors_bounded(domain: &BTreeSet<Dyadic>, max_nodes: u64) -> Result<MinColors, ColoringError> {
    let mut lower = 1;
    let mut open = false;
    for c in 1..=SUFFICIENT_COLORS {
        match search_coloring_bounded(domain, c, max_nodes)? {
            SearchOutcome::Found(coloring) => return Ok(MinColors { lower, upper: Some(c), witness: Some(coloring) }),
            SearchOutcome::Impossible if !open => lower = c + 1,
            SearchOutcome::Impossible => {}
            SearchOutcome::GaveUp { .. } => open = true,
        }
    }
    Ok(MinColors { lower, upper: None, witness: None })
}
