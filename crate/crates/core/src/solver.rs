//! Exact analysis of the game for a fixed alphabet size.
//!
//! The value of a square-free word `w` is the length at which the game
//! stops when Bob minimizes and Alice maximizes:
//!
//! ```text
//! val(w) = min over slots i of  |w|                         if no color is safe at i
//!                               max over safe x of val(w')  otherwise
//! ```
//!
//! Only the color word matters, so states are words up to renaming letters
//! (and optionally reversal). The search answers "can Bob stop the game by
//! length `L`?" for increasing `L`, keeping for every state the best known
//! lower and upper bounds so that deeper passes reuse shallower ones.

use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{BobStrategy, GameState, StrategyError};
use crate::words::{self, canonical_symbols, Alphabet, Symbol, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("the word {0} already contains a square")]
    Repetitive(Word),
    #[error("budget must be at least 1")]
    InvalidBudget,
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Longest word the search expands.
    pub budget: usize,
    pub use_reversal_symmetry: bool,
    /// The search gives up with a bracket once the memo holds this many
    /// states; entries are never evicted.
    pub memo_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { budget: 40, use_reversal_symmetry: true, memo_limit: 40_000_000 }
    }
}

impl SolverConfig {
    pub fn with_budget(budget: usize) -> Self {
        SolverConfig { budget, ..Default::default() }
    }
}

/// An exact game value, or bounds when the search stopped early.
/// `upper: None` means no finite upper bound is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameValue {
    #[serde(rename = "value")]
    Exact(usize),
    Bracket {
        lower: usize,
        upper: Option<usize>,
    },
}

impl GameValue {
    pub fn exact(self) -> Option<usize> {
        match self {
            GameValue::Exact(v) => Some(v),
            GameValue::Bracket { .. } => None,
        }
    }

    /// Smallest length the game can still stop at.
    pub fn lower(self) -> usize {
        match self {
            GameValue::Exact(v) => v,
            GameValue::Bracket { lower, .. } => lower,
        }
    }
}

/// One step of the principal variation. `color` is `None` on Bob's final
/// move, where every color completes a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvStep {
    pub slot: usize,
    pub color: Option<Symbol>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub states: u64,
    pub memo_hits: u64,
}

/// Result of [`solve_game`], serialized as the solver report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub q: u8,
    pub budget: usize,
    #[serde(flatten)]
    pub value: GameValue,
    pub principal_variation: Vec<PvStep>,
    pub states: u64,
    pub memo_hits: u64,
    pub wall_time_ms: u64,
}

impl SolveOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    /// val >= lower
    lower: u16,
    /// val <= upper
    upper: u16,
}

struct MemoFull;

pub struct Solver {
    alphabet: Alphabet,
    config: SolverConfig,
    memo: FxHashMap<Box<[Symbol]>, Bounds>,
    stats: SolveStats,
    scratch: Vec<Symbol>,
}

impl Solver {
    pub fn new(q: u8, config: SolverConfig) -> Result<Solver, SolverError> {
        if config.budget == 0 {
            return Err(SolverError::InvalidBudget);
        }
        Ok(Solver {
            alphabet: Alphabet::new(q as usize)?,
            config,
            memo: FxHashMap::default(),
            stats: SolveStats::default(),
            scratch: Vec::new(),
        })
    }

    pub fn q(&self) -> u8 {
        self.alphabet.size()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn key(&self, s: &[Symbol]) -> Box<[Symbol]> {
        let forward = canonical_symbols(s);
        if self.config.use_reversal_symmetry {
            let rev: Vec<Symbol> = s.iter().rev().copied().collect();
            let backward = canonical_symbols(&rev);
            if backward < forward {
                return backward.into_boxed_slice();
            }
        }
        forward.into_boxed_slice()
    }

    fn check(&self, w: &Word) -> Result<(), SolverError> {
        self.alphabet.check(w)?;
        if !words::is_nonrepetitive(w) {
            return Err(SolverError::Repetitive(w.clone()));
        }
        Ok(())
    }

    /// Safe children of `s` at `slot`, one per distinct canonical form.
    fn children(&mut self, s: &[Symbol], slot: usize) -> Vec<Vec<Symbol>> {
        // Letters beyond the highest one in use give the same canonical
        // child, so only the first unused letter is tried.
        let used = s.iter().copied().max().map_or(0, |m| m as usize + 1);
        let tried = (used + 1).min(self.q() as usize) as Symbol;
        let mut out = Vec::new();
        for x in 0..tried {
            if words::insertion_is_safe(s, slot, x, &mut self.scratch) {
                out.push(self.scratch.clone());
            }
        }
        out
    }

    fn safe_colors(&mut self, s: &[Symbol], slot: usize) -> Vec<Symbol> {
        (0..self.q()).filter(|&x| words::insertion_is_safe(s, slot, x, &mut self.scratch)).collect()
    }

    /// Whether Bob can make the game stop with at most `limit` letters.
    fn bob_forces(&mut self, s: &[Symbol], limit: usize) -> Result<bool, MemoFull> {
        let n = s.len();
        if n > limit {
            return Ok(false);
        }
        let key = self.key(s);
        if let Some(b) = self.memo.get(&key) {
            if b.upper as usize <= limit {
                self.stats.memo_hits += 1;
                return Ok(true);
            }
            if b.lower as usize > limit {
                self.stats.memo_hits += 1;
                return Ok(false);
            }
        }
        self.stats.states += 1;
        let mut options: Vec<Vec<Vec<Symbol>>> = Vec::with_capacity(n + 1);
        for slot in 0..=n {
            let children = self.children(s, slot);
            if children.is_empty() {
                self.record(key, limit, true)?;
                return Ok(true);
            }
            options.push(children);
        }
        if n == limit {
            self.record(key, limit, false)?;
            return Ok(false);
        }
        options.sort_by_key(Vec::len);
        for children in &options {
            let mut all = true;
            for child in children {
                if !self.bob_forces(child, limit)? {
                    all = false;
                    break;
                }
            }
            if all {
                self.record(key, limit, true)?;
                return Ok(true);
            }
        }
        self.record(key, limit, false)?;
        Ok(false)
    }

    fn record(&mut self, key: Box<[Symbol]>, limit: usize, forced: bool) -> Result<(), MemoFull> {
        let len = key.len() as u16;
        let at_capacity = self.memo.len() >= self.config.memo_limit;
        let entry = match self.memo.get_mut(&key) {
            Some(e) => e,
            None if at_capacity => return Err(MemoFull),
            None => self.memo.entry(key).or_insert(Bounds { lower: len, upper: u16::MAX }),
        };
        if forced {
            entry.upper = entry.upper.min(limit as u16);
        } else {
            entry.lower = entry.lower.max(limit as u16 + 1);
        }
        Ok(())
    }

    /// `val(w)`, or a bracket if it exceeds the budget or the memo fills.
    pub fn value_of(&mut self, w: &Word) -> Result<GameValue, SolverError> {
        self.check(w)?;
        Ok(self.value_unchecked(w.as_slice(), self.config.budget))
    }

    fn value_unchecked(&mut self, s: &[Symbol], budget: usize) -> GameValue {
        for limit in s.len()..=budget {
            match self.bob_forces(s, limit) {
                Ok(true) => return GameValue::Exact(limit),
                Ok(false) => {}
                Err(MemoFull) => return GameValue::Bracket { lower: limit, upper: None },
            }
        }
        GameValue::Bracket { lower: budget.max(s.len()) + 1, upper: None }
    }

    /// Bob's value for choosing `slot` on `s`, assuming `val(s) <= limit`
    /// is being tested.
    fn slot_forces(&mut self, s: &[Symbol], slot: usize, limit: usize) -> Result<bool, MemoFull> {
        let children = self.children(s, slot);
        if children.is_empty() {
            return Ok(s.len() <= limit);
        }
        if s.len() >= limit {
            return Ok(false);
        }
        for child in &children {
            if !self.bob_forces(child, limit)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The smallest slot achieving the minimum in `val(w)`, with the value.
    /// When the value is not exact the slot is Bob's trap heuristic.
    pub fn best_move(&mut self, w: &Word) -> Result<(usize, GameValue), SolverError> {
        let value = self.value_of(w)?;
        let s = w.as_slice();
        let Some(v) = value.exact() else {
            return Ok((trap_heuristic_move(w, self.q()), value));
        };
        for slot in 0..=s.len() {
            match self.slot_forces(s, slot, v) {
                Ok(true) => return Ok((slot, value)),
                Ok(false) => {}
                Err(MemoFull) => {
                    return Ok((trap_heuristic_move(w, self.q()), GameValue::Bracket { lower: v, upper: Some(v) }))
                }
            }
        }
        unreachable!("some slot achieves the exact value")
    }

    /// Optimal play from `w` when `val(w)` is exact: Bob's smallest optimal
    /// slot, Alice's smallest color keeping the value, until Bob's trap.
    pub fn principal_variation(&mut self, w: &Word) -> Result<Vec<PvStep>, SolverError> {
        let Some(v) = self.value_of(w)?.exact() else {
            return Ok(Vec::new());
        };
        let mut s = w.as_slice().to_vec();
        let mut pv = Vec::new();
        loop {
            let Ok((slot, _)) = self.best_move(&Word::from(s.clone())) else { unreachable!("word stays square-free") };
            let colors = self.safe_colors(&s, slot);
            if colors.is_empty() {
                pv.push(PvStep { slot, color: None });
                debug_assert_eq!(s.len(), v);
                return Ok(pv);
            }
            let mut chosen = None;
            for x in colors {
                let mut child = s.clone();
                child.insert(slot, x);
                if self.value_unchecked(&child, v) == GameValue::Exact(v) {
                    chosen = Some((x, child));
                    break;
                }
            }
            let (x, child) = chosen.expect("Alice has a value-preserving reply");
            pv.push(PvStep { slot, color: Some(x) });
            s = child;
        }
    }
}

/// `val(w)` under `config`.
pub fn value_of(w: &Word, q: u8, config: SolverConfig) -> Result<GameValue, SolverError> {
    Solver::new(q, config)?.value_of(w)
}

/// Solves the game from the empty board.
pub fn solve_game(q: u8, config: SolverConfig) -> Result<SolveOutcome, SolverError> {
    let started = Instant::now();
    let mut solver = Solver::new(q, config)?;
    let empty = Word::new();
    let value = solver.value_of(&empty)?;
    let principal_variation = solver.principal_variation(&empty)?;
    let stats = solver.stats();
    Ok(SolveOutcome {
        q,
        budget: config.budget,
        value,
        principal_variation,
        states: stats.states,
        memo_hits: stats.memo_hits,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// Bob's optimal slot on `w`, smallest index among ties.
pub fn bob_best_move(w: &Word, q: u8, config: SolverConfig) -> Result<usize, SolverError> {
    Ok(Solver::new(q, config)?.best_move(w)?.0)
}

/// The slot leaving Alice the fewest safe colors, smallest index among ties.
pub fn trap_heuristic_move(w: &Word, q: u8) -> usize {
    let s = w.as_slice();
    let mut buf = Vec::new();
    (0..=s.len())
        .min_by_key(|&slot| (0..q).filter(|&x| words::insertion_is_safe(s, slot, x, &mut buf)).count())
        .expect("at least one slot")
}

/// Straight minimax from the definition without memo or symmetry, capped
/// at length `cap`: returns `min(val(w), cap + 1)`.
pub fn naive_value(w: &Word, q: u8, cap: usize) -> usize {
    fn go(s: &[Symbol], q: u8, cap: usize) -> usize {
        let n = s.len();
        let mut best = usize::MAX;
        for slot in 0..=n {
            let mut slot_value = None::<usize>;
            for x in 0..q {
                let mut child = s.to_vec();
                child.insert(slot, x);
                if words::find_repetition(&Word::from(child.clone())).is_none() {
                    let v = if n + 1 > cap { cap + 1 } else { go(&child, q, cap) };
                    slot_value = Some(slot_value.map_or(v, |m| m.max(v)));
                }
            }
            best = best.min(slot_value.unwrap_or(n));
        }
        best.min(cap + 1)
    }
    go(w.as_slice(), q, cap)
}

/// Bob playing the solver; falls back to the trap heuristic when the value
/// is not exact within the budget.
pub struct SolverBob {
    solver: Solver,
    last_exact: bool,
}

impl SolverBob {
    pub fn new(q: u8, config: SolverConfig) -> Result<Self, SolverError> {
        Ok(SolverBob { solver: Solver::new(q, config)?, last_exact: true })
    }

    /// Whether the last move came from an exact solution.
    pub fn last_move_exact(&self) -> bool {
        self.last_exact
    }
}

impl BobStrategy for SolverBob {
    fn name(&self) -> &str {
        "solver"
    }

    fn choose_slot(&mut self, state: &GameState) -> Result<usize, StrategyError> {
        let (slot, value) = self.solver.best_move(&state.word_of()).map_err(|e| StrategyError(e.to_string()))?;
        self.last_exact = value.exact().is_some();
        Ok(slot)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrapBob;

impl BobStrategy for TrapBob {
    fn name(&self) -> &str {
        "trap"
    }

    fn choose_slot(&mut self, state: &GameState) -> Result<usize, StrategyError> {
        Ok(trap_heuristic_move(&state.word_of(), state.q()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_letters(s).unwrap()
    }

    fn cfg(budget: usize) -> SolverConfig {
        SolverConfig::with_budget(budget)
    }

    #[test]
    fn small_values() {
        assert_eq!(value_of(&w("acbc"), 3, cfg(20)).unwrap(), GameValue::Exact(4));
        assert_eq!(value_of(&w("ab"), 2, cfg(20)).unwrap(), GameValue::Exact(2));
        assert_eq!(value_of(&Word::new(), 1, cfg(20)).unwrap(), GameValue::Exact(1));
        assert!(matches!(value_of(&w("aa"), 2, cfg(20)), Err(SolverError::Repetitive(_))));
        assert!(value_of(&w("ad"), 3, cfg(20)).is_err());
    }

    #[test]
    fn solve_tiny_alphabets() {
        assert_eq!(solve_game(1, cfg(10)).unwrap().value, GameValue::Exact(1));
        assert_eq!(solve_game(2, cfg(10)).unwrap().value, GameValue::Exact(2));
        assert_eq!(naive_value(&Word::new(), 2, 4), 2);
        assert_eq!(naive_value(&Word::new(), 1, 4), 1);
    }

    #[test]
    fn best_moves() {
        assert_eq!(bob_best_move(&w("acbc"), 3, cfg(20)).unwrap(), 1);
        assert_eq!(bob_best_move(&w("ab"), 2, cfg(20)).unwrap(), 1);
        for q in 1..=4 {
            assert_eq!(bob_best_move(&Word::new(), q, cfg(20)).unwrap(), 0);
        }
    }

    #[test]
    fn trap_heuristic() {
        assert_eq!(trap_heuristic_move(&w("acbc"), 3), 1);
        assert_eq!(trap_heuristic_move(&Word::new(), 3), 0);
    }

    #[test]
    fn budget_cutoff_gives_bracket() {
        let v = value_of(&Word::new(), 12, cfg(3)).unwrap();
        assert_eq!(v, GameValue::Bracket { lower: 4, upper: None });
        let tiny_memo = SolverConfig { budget: 20, use_reversal_symmetry: true, memo_limit: 2 };
        assert!(matches!(value_of(&Word::new(), 3, tiny_memo).unwrap(), GameValue::Bracket { upper: None, .. }));
    }

    #[test]
    fn report_json_shapes() {
        let r = solve_game(2, cfg(10)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["value"], 2);
        assert_eq!(v["q"], 2);
        assert!(v["principal_variation"].is_array());
        let r = solve_game(12, cfg(3)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["bracket"]["lower"], 4);
        assert!(v["bracket"]["upper"].is_null());
        assert!(v.get("value").is_none());
    }
}
