//! `thue`, the command-line front end: one subcommand per experiment or
//! suite, plus terminal play and the HTTP service.
//!
//! Exit codes: 0 success, 1 usage error, 2 incomplete result (bracket or
//! node budget), 3 verification failure.

mod play;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thue_core::alice::{self, SUFFICIENT_COLORS};
use thue_core::dyadic::reachable_positions;
use thue_core::solver::solve_game;
use thue_core::words::{thue_word, MAX_ALPHABET};
use thue_core::{GameValue, SolverConfig};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INCOMPLETE: u8 = 2;
pub const EXIT_FAILED: u8 = 3;

/// Node cap per color count in `min-colors`.
const MIN_COLORS_NODES: u64 = 2_000_000;

#[derive(Parser, Debug)]
#[command(name = "thue", version, about = "Online Thue game workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact game value for an alphabet size, or a bracket.
    Solve {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        budget: usize,
        /// Do not identify a word with its reversal in the memo.
        #[arg(long)]
        no_reversal: bool,
    },
    /// Search and certify a coloring table for a round count.
    Prepare {
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        colors: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play in the terminal against the engine.
    Play {
        #[arg(long, value_enum)]
        mode: PlayMode,
        #[arg(long)]
        q: u8,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        coloring: Option<PathBuf>,
    },
    /// Run one of the oracle suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Print a square-free word over three letters.
    GenThue {
        #[arg(long)]
        length: usize,
    },
    /// Fewest colors for a safe table on the reachable positions.
    MinColors {
        #[arg(long)]
        rounds: usize,
    },
    /// Start the HTTP service. The PORT environment variable, when set,
    /// takes precedence over --port.
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlayMode {
    HumanBob,
    HumanAlice,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Adjacency,
    Checker,
    Coloring,
    SolverOracle,
}

/// A command's failure: exit code plus message for standard error.
pub struct Failure(pub u8, pub String);

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

/// Writes a line to standard output; a closed pipe is not an error.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub fn print_json(value: &serde_json::Value) {
    emit(&serde_json::to_string_pretty(value).expect("json"));
}

fn solve(q: u8, budget: usize, no_reversal: bool) -> Result<u8, Failure> {
    if q == 0 || q > MAX_ALPHABET {
        return Err(usage(format!("--q must be in 1..={MAX_ALPHABET}")));
    }
    if budget == 0 {
        return Err(usage("--budget must be at least 1"));
    }
    let config = SolverConfig { use_reversal_symmetry: !no_reversal, ..SolverConfig::with_budget(budget) };
    let out = solve_game(q, config).map_err(|e| usage(e.to_string()))?;
    let mut report = serde_json::to_value(&out).expect("report");
    // Past the solver's reach a certified table shows Alice lasting the
    // whole budget.
    if q >= SUFFICIENT_COLORS && out.value.exact().is_none() && budget <= thue_service::session::MAX_PREPARED_ROUNDS {
        let table = alice::prepare(budget, SUFFICIENT_COLORS).map_err(|e| Failure(EXIT_FAILED, e.to_string()))?;
        report["coloring_assist"] = json!({
            "rounds": budget,
            "colors": SUFFICIENT_COLORS,
            "positions": table.len(),
            "survival": budget,
        });
    }
    print_json(&report);
    Ok(match out.value {
        GameValue::Exact(_) => 0,
        GameValue::Bracket { .. } => EXIT_INCOMPLETE,
    })
}

fn prepare(rounds: usize, colors: u8, out: &PathBuf) -> Result<u8, Failure> {
    if rounds == 0 {
        return Err(usage("--rounds must be at least 1"));
    }
    if colors == 0 || colors > MAX_ALPHABET {
        return Err(usage(format!("--colors must be in 1..={MAX_ALPHABET}")));
    }
    let start = Instant::now();
    let table = alice::prepare(rounds, colors).map_err(|e| Failure(EXIT_FAILED, format!("prepare failed: {e}")))?;
    std::fs::write(out, table.to_file_string()).map_err(|e| Failure(EXIT_FAILED, format!("{}: {e}", out.display())))?;
    let used = table.iter().map(|(_, c)| c).collect::<std::collections::BTreeSet<_>>().len();
    print_json(&json!({
        "rounds": rounds,
        "colors": colors,
        "colors_used": used,
        "positions": table.len(),
        "verified": true,
        "out": out.display().to_string(),
        "wall_time_ms": start.elapsed().as_millis() as u64,
    }));
    Ok(0)
}

fn gen_thue(length: usize) -> Result<u8, Failure> {
    emit(&serde_json::to_string(&thue_word(length)).expect("json"));
    Ok(0)
}

fn min_colors(rounds: usize) -> Result<u8, Failure> {
    let domain = reachable_positions(rounds).map_err(|e| usage(e.to_string()))?;
    let start = Instant::now();
    let m = alice::min_colors_bounded(&domain, MIN_COLORS_NODES).map_err(|e| Failure(EXIT_FAILED, e.to_string()))?;
    let witness = m.witness.as_ref().map(|c| {
        c.iter().map(|(p, color)| json!({"num": p.num(), "depth": p.depth(), "color": color})).collect::<Vec<_>>()
    });
    let mut report = json!({
        "rounds": rounds,
        "positions": domain.len(),
        "node_limit": MIN_COLORS_NODES,
        "wall_time_ms": start.elapsed().as_millis() as u64,
        "witness": witness,
    });
    match m.exact() {
        Some(c) => report["min_colors"] = json!(c),
        None => report["bracket"] = json!({"lower": m.lower, "upper": m.upper}),
    }
    print_json(&report);
    match (m.exact(), m.upper) {
        (Some(_), _) => Ok(0),
        (None, Some(_)) => Ok(EXIT_INCOMPLETE),
        (None, None) => {
            Err(Failure(EXIT_FAILED, format!("no table with {SUFFICIENT_COLORS} colors found within the node limit")))
        }
    }
}

fn serve(flag: Option<u16>) -> Result<u8, Failure> {
    let port = match std::env::var("PORT") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("PORT={v} is not a port number")))?,
        Err(_) => flag.ok_or_else(|| usage("serve needs --port or PORT"))?,
    };
    let store = std::sync::Arc::new(thue_service::SessionStore::new(
        thue_service::session::DEFAULT_CAPACITY,
        thue_service::ColoringSource::from_env(),
    ));
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], port));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure(EXIT_FAILED, e.to_string()))?;
    eprintln!("listening on {addr}");
    runtime.block_on(thue_service::serve(addr, store)).map_err(|e| Failure(EXIT_FAILED, format!("{addr}: {e}")))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { q, budget, no_reversal } => solve(q, budget, no_reversal),
        Command::Prepare { rounds, colors, out } => prepare(rounds, colors, &out),
        Command::Play { mode, q, rounds, coloring } => play::run(mode, q, rounds, coloring.as_deref()),
        Command::Verify { suite, coloring, rounds } => verify::run(suite, coloring.as_deref(), rounds),
        Command::GenThue { length } => gen_thue(length),
        Command::MinColors { rounds } => min_colors(rounds),
        Command::Serve { port } => serve(port),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
