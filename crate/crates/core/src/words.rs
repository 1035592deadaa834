//! Finite words over small integer alphabets and square detection.
//!
//! A *square* (repetition) of size `t` is a factor `xx` with `|x| = t`. All
//! contracts in this module use 1-based positions inside a word, and a
//! [`Repetition`] with `start = i` occupies positions `i+1 ..= i+2t`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single letter. Letters of an alphabet of size `q` are `0..q`.
pub type Symbol = u8;

/// Largest supported alphabet.
pub const MAX_ALPHABET: u8 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet size {0} outside 1..={MAX_ALPHABET}")]
    InvalidAlphabet(usize),
    #[error("symbol {symbol} not in alphabet of size {q}")]
    SymbolOutOfRange { symbol: Symbol, q: u8 },
    #[error("position {pos} outside 1..={len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("insertion slot {slot} outside 0..={len}")]
    SlotOutOfRange { slot: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    q: u8,
}

impl Alphabet {
    pub fn new(q: usize) -> Result<Self, WordError> {
        if q == 0 || q > MAX_ALPHABET as usize {
            return Err(WordError::InvalidAlphabet(q));
        }
        Ok(Alphabet { q: q as u8 })
    }

    pub fn size(self) -> u8 {
        self.q
    }

    pub fn symbols(self) -> impl Iterator<Item = Symbol> {
        0..self.q
    }

    pub fn contains(self, symbol: Symbol) -> bool {
        symbol < self.q
    }

    /// Checks that every letter of `word` belongs to this alphabet.
    pub fn check(self, word: &Word) -> Result<(), WordError> {
        match word.iter().find(|&s| !self.contains(s)) {
            Some(symbol) => Err(WordError::SymbolOutOfRange { symbol, q: self.q }),
            None => Ok(()),
        }
    }
}

/// A square `s[start+1 ..= start+2*size]` (1-based) whose two halves agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Repetition {
    pub start: usize,
    pub size: usize,
}

impl Repetition {
    /// One past the last occupied 0-based index.
    pub fn end(&self) -> usize {
        self.start + 2 * self.size
    }

    /// Whether the 1-based position `pos` lies inside the square.
    pub fn covers(&self, pos: usize) -> bool {
        pos > self.start && pos <= self.end()
    }

    /// Holds iff the square really occurs in `symbols`.
    pub fn occurs_in(&self, symbols: &[Symbol]) -> bool {
        self.size >= 1
            && self.end() <= symbols.len()
            && (0..self.size).all(|j| symbols[self.start + j] == symbols[self.start + self.size + j])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Symbol> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().copied()
    }

    /// 1-based access.
    pub fn at(&self, pos: usize) -> Option<Symbol> {
        pos.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    /// Returns the word with `symbol` placed right after the first `slot`
    /// letters (slot 0 prepends, slot `len` appends).
    pub fn inserted(&self, slot: usize, symbol: Symbol) -> Result<Word, WordError> {
        if slot > self.len() {
            return Err(WordError::SlotOutOfRange { slot, len: self.len() });
        }
        let mut v = Vec::with_capacity(self.len() + 1);
        v.extend_from_slice(&self.0[..slot]);
        v.push(symbol);
        v.extend_from_slice(&self.0[slot..]);
        Ok(Word(v))
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Letter form (`0 -> a`, ...) for alphabets up to 26; numeric otherwise.
    pub fn letters(&self) -> String {
        if self.0.iter().all(|&s| s < 26) {
            self.0.iter().map(|&s| (b'a' + s) as char).collect()
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            parts.join(" ")
        }
    }

    /// Parses the letter form produced by [`Word::letters`] (`a..z` only).
    pub fn from_letters(text: &str) -> Option<Word> {
        text.chars().map(|c| c.is_ascii_lowercase().then(|| c as u8 - b'a')).collect::<Option<Vec<_>>>().map(Word)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters())
    }
}

/// For one period `t`, the first square of that size in `s`, scanning the
/// match run `s[j] == s[j + t]`. Only squares ending strictly before
/// `end_limit` are reported.
fn first_square_of_size(s: &[Symbol], t: usize, end_limit: usize) -> Option<usize> {
    let mut run = 0;
    for j in 0..s.len().saturating_sub(t) {
        if j + t + 1 >= end_limit {
            break;
        }
        if s[j] == s[j + t] {
            run += 1;
            if run >= t {
                return Some(j + 1 - t);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// The square with the smallest end index, ties broken by the smallest size.
///
/// Runs in `O(n^2)`: one linear scan per candidate size.
pub fn find_repetition(w: &Word) -> Option<Repetition> {
    let s = w.as_slice();
    let mut best: Option<Repetition> = None;
    for t in 1..=s.len() / 2 {
        let limit = best.map_or(usize::MAX, |b| b.end());
        if 2 * t >= limit {
            break;
        }
        if let Some(start) = first_square_of_size(s, t, limit) {
            let r = Repetition { start, size: t };
            if best.is_none_or(|b| r.end() < b.end()) {
                best = Some(r);
            }
        }
    }
    best
}

pub fn is_nonrepetitive(w: &Word) -> bool {
    find_repetition(w).is_none()
}

/// A square covering the 1-based position `pos`, or `None`.
///
/// When deleting `s_pos` leaves a square-free word, every square of `w`
/// covers `pos`, so `None` here means `w` is square-free. The witness obeys
/// the same tie-break as [`find_repetition`].
pub fn repetition_through(w: &Word, pos: usize) -> Result<Option<Repetition>, WordError> {
    let n = w.len();
    if pos == 0 || pos > n {
        return Err(WordError::PositionOutOfRange { pos, len: n });
    }
    Ok(square_covering(w.as_slice(), pos - 1))
}

/// Squares covering the 0-based index `p`; `O(n^2)` overall.
pub(crate) fn square_covering(s: &[Symbol], p: usize) -> Option<Repetition> {
    let n = s.len();
    let mut best: Option<Repetition> = None;
    for t in 1..=n / 2 {
        // Starts i with i <= p < i + 2t and i + 2t <= n.
        let lo = (p + 1).saturating_sub(2 * t);
        if lo + 2 * t > n {
            break;
        }
        let hi = p.min(n - 2 * t);
        let mut run = 0;
        for j in lo..hi + t {
            if s[j] == s[j + t] {
                run += 1;
                if run >= t {
                    let start = j + 1 - t;
                    let r = Repetition { start, size: t };
                    if best.is_none_or(|b| r.end() < b.end()) {
                        best = Some(r);
                    }
                    break;
                }
            } else {
                run = 0;
            }
        }
        // A larger period covering p cannot end before max(p + 1, 2t + 2).
        if best.is_some_and(|b| b.end() <= (p + 1).max(2 * t + 2)) {
            break;
        }
    }
    best
}

/// Whether inserting `symbol` at `slot` into the square-free `w` keeps it
/// square-free. Does not allocate when the answer is computed in place.
pub fn insertion_is_safe(w: &[Symbol], slot: usize, symbol: Symbol, buf: &mut Vec<Symbol>) -> bool {
    buf.clear();
    buf.extend_from_slice(&w[..slot]);
    buf.push(symbol);
    buf.extend_from_slice(&w[slot..]);
    square_covering(buf, slot).is_none()
}

/// Relabels letters in order of first occurrence.
pub fn canonical_form(w: &Word) -> Word {
    Word(canonical_symbols(w.as_slice()))
}

pub(crate) fn canonical_symbols(s: &[Symbol]) -> Vec<Symbol> {
    let mut map = [u8::MAX; MAX_ALPHABET as usize];
    let mut next = 0u8;
    s.iter()
        .map(|&c| {
            let slot = &mut map[c as usize];
            if *slot == u8::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect()
}

/// Prefix of length `n` of the fixed point of `0 -> 012, 1 -> 02, 2 -> 1`,
/// an infinite square-free word over three letters.
pub fn thue_word(n: usize) -> Word {
    let mut w: Vec<Symbol> = vec![0];
    while w.len() < n {
        let mut next = Vec::with_capacity(w.len() * 2 + 2);
        for &c in &w {
            match c {
                0 => next.extend_from_slice(&[0, 1, 2]),
                1 => next.extend_from_slice(&[0, 2]),
                _ => next.push(1),
            }
        }
        w = next;
    }
    w.truncate(n);
    Word(w)
}

fn z_function(s: &[Symbol]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// Squares of `u ++ v` crossing the boundary whose centre lies in `u`.
fn crossing_square_left(u: &[Symbol], v: &[Symbol]) -> bool {
    let m = u.len();
    if m == 0 || v.is_empty() {
        return false;
    }
    // back[k] = longest common suffix of u[..m-k] and u.
    let rev: Vec<Symbol> = u.iter().rev().copied().collect();
    let back = z_function(&rev);
    // fwd[pos] = lcp(u[pos..], v), capped at m - pos.
    let mut joined = Vec::with_capacity(u.len() + v.len() + 1);
    joined.extend_from_slice(v);
    joined.push(u8::MAX);
    joined.extend_from_slice(u);
    let z = z_function(&joined);
    for pos in 0..m {
        let l = m - pos;
        if l > v.len() {
            continue;
        }
        let fwd = z[v.len() + 1 + pos];
        let left = if pos == 0 { 0 } else { back[m - pos] };
        if fwd >= 1 && left + fwd >= l {
            return true;
        }
    }
    false
}

fn has_square_rec(s: &[Symbol]) -> bool {
    if s.len() < 2 {
        return false;
    }
    let m = s.len() / 2;
    let (u, v) = s.split_at(m);
    if crossing_square_left(u, v) {
        return true;
    }
    let ru: Vec<Symbol> = u.iter().rev().copied().collect();
    let rv: Vec<Symbol> = v.iter().rev().copied().collect();
    if crossing_square_left(&rv, &ru) {
        return true;
    }
    has_square_rec(u) || has_square_rec(v)
}

/// Divide-and-conquer square test (Main and Lorentz), `O(n log n)`.
///
/// Answers only existence; use [`find_repetition`] for a witness.
pub fn has_square_fast(w: &Word) -> bool {
    has_square_rec(w.as_slice())
}

/// Definitional cubic search over every `(i, t)` in the same tie-break
/// order as [`find_repetition`]. Reference implementation for checks.
pub fn find_repetition_brute_force(w: &Word) -> Option<Repetition> {
    let s = w.as_slice();
    let n = s.len();
    for end in 2..=n {
        for t in 1..=end / 2 {
            let i = end - 2 * t;
            if (1..=t).all(|j| s[i + j - 1] == s[i + t + j - 1]) {
                return Some(Repetition { start: i, size: t });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_letters(s).unwrap()
    }

    #[test]
    fn finds_minimal_end_square() {
        assert_eq!(find_repetition(&Word::from(vec![0, 1, 0, 1])), Some(Repetition { start: 0, size: 2 }));
        assert_eq!(find_repetition(&w("abcbc")), Some(Repetition { start: 1, size: 2 }));
        assert_eq!(find_repetition(&w("acbc")), None);
        assert_eq!(find_repetition(&w("aa")), Some(Repetition { start: 0, size: 1 }));
        // ends tie at 4: "abab" (t=2) vs "bb"? make "abba": t=1 at end 3
        assert_eq!(find_repetition(&w("abba")), Some(Repetition { start: 1, size: 1 }));
    }

    #[test]
    fn empty_and_trivial() {
        assert!(is_nonrepetitive(&Word::new()));
        assert!(!is_nonrepetitive(&w("aa")));
        assert!(is_nonrepetitive(&w("a")));
    }

    #[test]
    fn through_position() {
        assert_eq!(repetition_through(&w("aacbc"), 2).unwrap(), Some(Repetition { start: 0, size: 1 }));
        assert_eq!(repetition_through(&w("abcbc"), 2).unwrap(), Some(Repetition { start: 1, size: 2 }));
        assert_eq!(repetition_through(&w("acbac"), 4).unwrap(), None);
        assert_eq!(find_repetition_brute_force(&w("acbac")), None);
        assert!(repetition_through(&w("abc"), 0).is_err());
        assert!(repetition_through(&w("abc"), 4).is_err());
    }

    #[test]
    fn through_matches_tie_break_of_full_scan() {
        // every square of "accbc" covers position 3
        let x = w("accbc");
        assert_eq!(repetition_through(&x, 3).unwrap(), find_repetition(&x));
    }

    #[test]
    fn canonical_relabels_by_first_occurrence() {
        assert_eq!(canonical_form(&w("cacb")), Word::from(vec![0, 1, 0, 2]));
        assert_eq!(canonical_form(&Word::new()), Word::new());
    }

    #[test]
    fn thue_prefixes() {
        assert_eq!(thue_word(0), Word::new());
        assert_eq!(thue_word(2), Word::from(vec![0, 1]));
        assert_eq!(thue_word(10).as_slice(), &[0, 1, 2, 0, 2, 1, 0, 1, 2, 1]);
        for n in 0..300 {
            let t = thue_word(n);
            assert_eq!(t.len(), n);
            assert!(is_nonrepetitive(&t), "prefix {n}");
        }
    }

    #[test]
    fn binary_words_of_length_four_all_have_squares() {
        for bits in 0u8..16 {
            let word = Word::from((0..4).map(|i| (bits >> i) & 1).collect::<Vec<_>>());
            assert!(find_repetition(&word).is_some());
            assert!(find_repetition_brute_force(&word).is_some());
        }
    }

    #[test]
    fn fast_test_agrees_on_small_words() {
        for n in 0..=9usize {
            for code in 0..3usize.pow(n as u32) {
                let mut c = code;
                let word: Word = (0..n)
                    .map(|_| {
                        let s = (c % 3) as u8;
                        c /= 3;
                        s
                    })
                    .collect::<Vec<_>>()
                    .into();
                assert_eq!(has_square_fast(&word), find_repetition_brute_force(&word).is_some(), "{word}");
            }
        }
    }

    #[test]
    fn alphabet_bounds() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(65).is_err());
        let a = Alphabet::new(3).unwrap();
        assert!(a.check(&w("abc")).is_ok());
        assert!(a.check(&w("abd")).is_err());
    }

    #[test]
    fn insertion_slots() {
        let x = w("ac");
        assert_eq!(x.inserted(0, 1).unwrap(), w("bac"));
        assert_eq!(x.inserted(2, 1).unwrap(), w("acb"));
        assert!(x.inserted(3, 1).is_err());
    }
}
