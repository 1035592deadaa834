//! The oracle suites behind `thue verify`.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use thue_core::alice::{find_monotone_square, verify_reachable};
use thue_core::dyadic::{adjacent, adjacent_definitional, reachable_positions};
use thue_core::solver::{naive_value, Solver};
use thue_core::words::{find_repetition, find_repetition_brute_force, thue_word};
use thue_core::{Coloring, Dyadic, GameValue, SolverConfig, Truncation, Word};

use crate::{print_json, usage, Failure, Suite, EXIT_FAILED};

/// Checks, or the first disagreement found.
type Outcome = Result<Value, Value>;

fn adjacency() -> Result<Outcome, Failure> {
    let vs: Vec<Dyadic> = Truncation::new(4, 6).map_err(|e| usage(e.to_string()))?.vertices().collect();
    let mut pairs = 0u64;
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            let fast = adjacent(u, v).map_err(|e| usage(e.to_string()))?;
            let slow = adjacent_definitional(u, v).map_err(|e| usage(e.to_string()))?;
            if fast != slow {
                return Ok(Err(json!({"u": u, "v": v, "adjacent": fast, "definitional": slow})));
            }
            pairs += 1;
        }
    }
    Ok(Ok(json!({"range": 4, "max_depth": 6, "vertices": vs.len(), "pairs": pairs})))
}

fn checker() -> Outcome {
    let mut words = 0u64;
    let mut buf = [0u8; 12];
    for n in 0..=12usize {
        for code in 0..3u64.pow(n as u32) {
            let mut c = code;
            for slot in buf[..n].iter_mut().rev() {
                *slot = (c % 3) as u8;
                c /= 3;
            }
            let w = Word::from(&buf[..n]);
            let (fast, slow) = (find_repetition(&w), find_repetition_brute_force(&w));
            if fast != slow {
                return Err(json!({"word": w, "find_repetition": fast, "brute_force": slow}));
            }
            words += 1;
        }
    }
    let thue = thue_word(512);
    if find_repetition_brute_force(&thue).is_some() {
        return Err(json!({"thue_prefix": 512}));
    }
    Ok(json!({"q": 3, "max_length": 12, "words": words, "thue_prefix_checked": 512}))
}

fn coloring(path: Option<&Path>, rounds: Option<usize>) -> Result<Outcome, Failure> {
    let path = path.ok_or_else(|| usage("--suite coloring needs --coloring"))?;
    let rounds = rounds.ok_or_else(|| usage("--suite coloring needs --rounds"))?;
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let table = Coloring::parse(&text).map_err(|e| Failure(EXIT_FAILED, format!("{}: {e}", path.display())))?;
    let verdict = match verify_reachable(rounds, &table) {
        Ok(v) => v,
        Err(e) => return Ok(Err(json!({"error": e.to_string()}))),
    };
    let domain = reachable_positions(rounds).map_err(|e| usage(e.to_string()))?;
    let restricted =
        Coloring::new(table.count(), domain.iter().map(|&p| (p, table.get(p).expect("covered"))).collect())
            .map_err(|e| usage(e.to_string()))?;
    let monotone = find_monotone_square(&domain, &restricted).map_err(|e| usage(e.to_string()))?;
    let summary = json!({
        "rounds": rounds,
        "positions": domain.len(),
        "colors": table.count(),
        "monotone_safe": monotone.is_none(),
    });
    Ok(match verdict {
        None => Ok(summary),
        Some(v) => Err(json!({"summary": summary, "points": v.points, "word": v.word, "witness": v.repetition})),
    })
}

fn solver_oracle() -> Outcome {
    let cap = 6;
    let mut states = 0u64;
    for q in 1..=3u8 {
        let mut solver = Solver::new(q, SolverConfig::with_budget(cap)).expect("valid solver");
        let mut level = vec![Vec::new()];
        for len in 0..=4 {
            for s in &level {
                let w = Word::from(s.clone());
                let naive = naive_value(&w, q, cap);
                let memo = match solver.value_of(&w).expect("square-free") {
                    GameValue::Exact(v) => v.min(cap + 1),
                    GameValue::Bracket { .. } => cap + 1,
                };
                if memo != naive {
                    return Err(json!({"q": q, "word": w, "memoized": memo, "naive": naive}));
                }
                states += 1;
            }
            if len == 4 {
                break;
            }
            level = level
                .iter()
                .flat_map(|s| (0..q).map(move |x| [s.as_slice(), &[x]].concat()))
                .filter(|s| find_repetition(&Word::from(s.clone())).is_none())
                .collect();
        }
    }
    Ok(json!({"alphabets": [1, 2, 3], "max_length": 4, "depth_cap": cap, "words": states}))
}

pub fn run(suite: Suite, path: Option<&Path>, rounds: Option<usize>) -> Result<u8, Failure> {
    let start = Instant::now();
    let (name, outcome) = match suite {
        Suite::Adjacency => ("adjacency", adjacency()?),
        Suite::Checker => ("checker", checker()),
        Suite::Coloring => ("coloring", coloring(path, rounds)?),
        Suite::SolverOracle => ("solver-oracle", solver_oracle()),
    };
    let pass = outcome.is_ok();
    let mut report = json!({"suite": name, "pass": pass, "wall_time_ms": start.elapsed().as_millis() as u64});
    match outcome {
        Ok(details) => report["details"] = details,
        Err(violation) => report["violation"] = violation,
    }
    print_json(&report);
    Ok(if pass { 0 } else { EXIT_FAILED })
}
