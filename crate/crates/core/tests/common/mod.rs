//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own detection or adjacency code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use thue_core::{Dyadic, Symbol};

/// Triple loop over every (i, t); minimal end, then minimal size.
pub fn cubic_square(s: &[Symbol]) -> Option<(usize, usize)> {
    let n = s.len();
    for end in 2..=n {
        for t in 1..=end / 2 {
            let i = end - 2 * t;
            if (0..t).all(|j| s[i + j] == s[i + t + j]) {
                return Some((i, t));
            }
        }
    }
    None
}

pub fn has_square(s: &[Symbol]) -> bool {
    cubic_square(s).is_some()
}

/// All words of length `n` over `q` symbols, in lexicographic order.
pub fn all_words(n: usize, q: Symbol) -> impl Iterator<Item = Vec<Symbol>> {
    let total = (q as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        let mut w = vec![0; n];
        for slot in w.iter_mut().rev() {
            *slot = (code % q as u64) as Symbol;
            code /= q as u64;
        }
        w
    })
}

/// Square-free words of length `n` over `q`, grown letter by letter.
pub fn square_free_words(n: usize, q: Symbol) -> Vec<Vec<Symbol>> {
    let mut level = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &level {
            for x in 0..q {
                let mut c = w.clone();
                c.push(x);
                if !has_square(&c) {
                    next.push(c);
                }
            }
        }
        level = next;
    }
    level
}

/// Value of a dyadic scaled to denominator `2^scale`.
pub fn scaled(x: Dyadic, scale: u32) -> i128 {
    (x.num() as i128) << (scale - x.depth())
}

/// No point of depth at most max(depth) strictly between, found by walking
/// the grid of that depth.
pub fn grid_adjacent(u: Dyadic, v: Dyadic) -> bool {
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    let k = lo.depth().max(hi.depth());
    let (a, b) = (scaled(lo, k), scaled(hi, k));
    (a + 1..b).next().is_none()
}

/// Board after a Bob slot sequence, computed on numerators over `2^scale`.
/// Returns `None` when a slot is out of range.
pub fn board_after(slots: &[usize], scale: u32) -> Option<Vec<Dyadic>> {
    let unit = 1i128 << scale;
    let mut pts: Vec<i128> = Vec::new();
    for &slot in slots {
        let n = pts.len();
        let x = if n == 0 {
            if slot != 0 {
                return None;
            }
            0
        } else if slot == 0 {
            pts[0] - unit
        } else if slot == n {
            pts[n - 1] + unit
        } else if slot < n {
            (pts[slot - 1] + pts[slot]) / 2
        } else {
            return None;
        };
        pts.insert(slot, x);
    }
    Some(pts.into_iter().map(|p| Dyadic::new(p as i64, scale).unwrap()).collect())
}

/// Every legal Bob slot sequence of exactly `len` moves.
pub fn slot_sequences(len: usize) -> Vec<Vec<usize>> {
    let mut level = vec![Vec::new()];
    for r in 0..len {
        let mut next = Vec::new();
        for seq in &level {
            for slot in 0..=r {
                let mut s: Vec<usize> = seq.clone();
                s.push(slot);
                next.push(s);
            }
        }
        level = next;
    }
    level
}

/// Positions touched by any Bob sequence of at most `rounds` moves.
pub fn naive_reachable(rounds: usize) -> BTreeSet<Dyadic> {
    let scale = rounds.max(1) as u32;
    let mut out = BTreeSet::new();
    for len in 1..=rounds {
        for seq in slot_sequences(len) {
            out.extend(board_after(&seq, scale).unwrap());
        }
    }
    out
}

/// Every strictly increasing path of the domain under `grid_adjacent`,
/// checked for a square; `colors` is indexed like the sorted domain.
pub fn monotone_square_exists(domain: &[Dyadic], colors: &[Symbol]) -> bool {
    fn extend(domain: &[Dyadic], colors: &[Symbol], path: &mut Vec<usize>, word: &mut Vec<Symbol>) -> bool {
        if has_square(word) {
            return true;
        }
        let last = *path.last().unwrap();
        for next in last + 1..domain.len() {
            if grid_adjacent(domain[last], domain[next]) {
                path.push(next);
                word.push(colors[next]);
                let found = extend(domain, colors, path, word);
                path.pop();
                word.pop();
                if found {
                    return true;
                }
            }
        }
        false
    }
    (0..domain.len()).any(|start| extend(domain, colors, &mut vec![start], &mut vec![colors[start]]))
}
