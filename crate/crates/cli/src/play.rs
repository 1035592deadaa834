//! Turn-by-turn terminal play through the same sessions the service uses.

use std::io::{self, BufRead, Write};
use std::path::Path;

use thue_core::alice::SUFFICIENT_COLORS;
use thue_core::{Coloring, Dyadic, Word};
use thue_service::session::{Turn, View};
use thue_service::{ColoringSource, Mode, ServiceError, SessionStore};

use crate::{usage, Failure, PlayMode, EXIT_FAILED};

fn board(view: &View) -> String {
    let points: Vec<String> =
        view.points.iter().map(|p| Dyadic::new(p.num, p.depth).map(|d| d.to_string()).unwrap_or_default()).collect();
    let word = Word::from(view.word.clone());
    let word = if view.q <= 26 { word.letters() } else { word.to_string() };
    format!("round {}/{}  points [{}]  word {}", view.rounds_played, view.rounds, points.join(", "), word)
}

fn announce(out: &mut impl Write, view: &View) -> io::Result<()> {
    writeln!(out, "{}", board(view))?;
    if let Some(w) = view.witness {
        let block = Word::from(view.word[w.start..w.start + 2 * w.size].to_vec());
        let block = if view.q <= 26 { block.letters() } else { block.to_string() };
        writeln!(out, "game over: square {block} at start {} size {}", w.start, w.size)?;
    } else if view.status == "forfeit" {
        writeln!(out, "game over: forfeit")?;
    } else if view.turn == Turn::None {
        writeln!(out, "all {} rounds played without a square", view.rounds)?;
    }
    Ok(())
}

enum Input {
    Number(u64),
    Quit,
    Eof,
}

fn ask(input: &mut impl BufRead, out: &mut impl Write, prompt: &str) -> io::Result<Input> {
    loop {
        write!(out, "{prompt}> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(Input::Eof);
        }
        let line = line.trim();
        if matches!(line, "q" | "quit" | "exit") {
            return Ok(Input::Quit);
        }
        match line.parse() {
            Ok(n) => return Ok(Input::Number(n)),
            Err(_) => writeln!(out, "enter a number, or quit")?,
        }
    }
}

pub fn run(mode: PlayMode, q: u8, rounds: usize, coloring: Option<&Path>) -> Result<u8, Failure> {
    let source = ColoringSource::from_env();
    if let Some(path) = coloring {
        if q < SUFFICIENT_COLORS {
            return Err(usage(format!("--coloring needs --q {SUFFICIENT_COLORS} or more")));
        }
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let table = Coloring::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        source.insert(rounds, table).map_err(|e| Failure(EXIT_FAILED, e.to_string()))?;
    }
    let store = SessionStore::new(1, source);
    let mode = match mode {
        PlayMode::HumanBob => Mode::HumanBob,
        PlayMode::HumanAlice => Mode::HumanAlice,
        PlayMode::Auto => Mode::Auto,
    };
    let mut view = store.create(mode, q as u64, rounds as u64).map_err(|e| usage(e.to_string()))?;
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let io_err = |e: io::Error| Failure(EXIT_FAILED, e.to_string());
    if let Some(engine) = view.adversary {
        writeln!(out, "engine bob: {}", serde_json::to_string(&engine).expect("json")).map_err(io_err)?;
    }
    if let Some(engine) = view.alice {
        writeln!(out, "engine alice: {}", serde_json::to_string(&engine).expect("json")).map_err(io_err)?;
    }
    loop {
        announce(&mut out, &view).map_err(io_err)?;
        let (prompt, want) = match view.turn {
            Turn::None => break,
            Turn::Bob => (format!("slot 0..={}", view.points.len()), Turn::Bob),
            Turn::Alice => {
                let p = view.pending.expect("pending point");
                (format!("color for {} at slot {} (0..{})", p.position, p.slot, view.q), Turn::Alice)
            }
        };
        let n = match ask(&mut input, &mut out, &prompt).map_err(io_err)? {
            Input::Number(n) => n,
            Input::Quit | Input::Eof => {
                writeln!(out, "bye").map_err(io_err)?;
                return Ok(0);
            }
        };
        let next = match want {
            Turn::Bob => store.bob_move(&view.id, usize::try_from(n).unwrap_or(usize::MAX)),
            _ => store.alice_move(&view.id, n),
        };
        match next {
            Ok(v) => view = v,
            Err(ServiceError::BadRequest(msg)) => writeln!(out, "rejected: {msg}").map_err(io_err)?,
            Err(e) => return Err(Failure(EXIT_FAILED, e.to_string())),
        }
    }
    writeln!(out, "{}", view.transcript.to_json()).map_err(io_err)?;
    Ok(0)
}
