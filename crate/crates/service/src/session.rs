//! Sessions, the store that holds them, and the views they render.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, TryLockError};

use lru::LruCache;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use thue_core::alice::{self, ColoringAlice, GreedyAlice, StrategySpec, SUFFICIENT_COLORS};
use thue_core::game::{AliceStrategy, BobStrategy, Pending, Player, Status, StrategyKind, TranscriptConfig};
use thue_core::solver::{SolverBob, TrapBob};
use thue_core::{Coloring, GameConfig, GameError, GameState, Repetition, SolverConfig, Symbol, Transcript};

/// Largest round count a table is searched for on demand; longer games
/// need a table from the coloring directory.
pub const MAX_PREPARED_ROUNDS: usize = 8;
/// Largest alphabet the solver plays exactly for.
pub const MAX_SOLVER_Q: u8 = 4;
pub const MAX_ROUNDS: usize = 256;
pub const DEFAULT_CAPACITY: usize = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("no session {0}")]
    NotFound(String),
    #[error("session {0} is busy")]
    Busy(String),
}

impl From<GameError> for ServiceError {
    fn from(e: GameError) -> Self {
        ServiceError::BadRequest(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The human places points; the engine colors them.
    HumanBob,
    /// The engine places points; the human colors them.
    HumanAlice,
    /// Both sides are engines; the match is played out on creation.
    Auto,
}

/// Which engine plays Alice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliceEngine {
    Coloring,
    Greedy,
}

/// Which engine plays Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobEngine {
    Solver,
    TrapHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Bob,
    Alice,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointView {
    pub num: i64,
    pub depth: u32,
    pub color: Symbol,
}

/// Everything a client needs to draw the board.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct View {
    pub id: String,
    pub mode: Mode,
    pub q: u8,
    pub rounds: usize,
    pub rounds_played: usize,
    pub points: Vec<PointView>,
    pub word: Vec<Symbol>,
    pub legal_slots: Vec<usize>,
    pub pending: Option<Pending>,
    pub turn: Turn,
    pub status: String,
    pub witness: Option<Repetition>,
    /// Engine playing Alice, absent when a human does.
    pub alice: Option<AliceEngine>,
    /// Engine playing Bob, absent when a human does.
    pub adversary: Option<BobEngine>,
    pub transcript: Transcript,
}

/// Renders a state. The view depends on the game only through its
/// transcript, so a replayed transcript renders identically.
pub fn render(
    id: &str,
    mode: Mode,
    alice: Option<AliceEngine>,
    adversary: Option<BobEngine>,
    state: &GameState,
) -> View {
    let transcript = state.transcript();
    let pending = state.pending();
    let turn = if !state.has_next_round() {
        Turn::None
    } else if pending.is_some() {
        Turn::Alice
    } else {
        Turn::Bob
    };
    View {
        id: id.to_owned(),
        mode,
        q: state.q(),
        rounds: state.config().max_rounds,
        rounds_played: state.rounds_played(),
        points: state.points().iter().map(|&(p, c)| PointView { num: p.num(), depth: p.depth(), color: c }).collect(),
        word: state.word_of().into_vec(),
        legal_slots: state.legal_slots().unwrap_or_default(),
        pending,
        turn,
        status: transcript.status.clone(),
        witness: state.witness(),
        alice,
        adversary,
        transcript,
    }
}

enum Alice {
    Table(ColoringAlice),
    Greedy(GreedyAlice),
}

impl Alice {
    fn engine(&mut self) -> &mut dyn AliceStrategy {
        match self {
            Alice::Table(a) => a,
            Alice::Greedy(a) => a,
        }
    }

    fn label(&self) -> AliceEngine {
        match self {
            Alice::Table(_) => AliceEngine::Coloring,
            Alice::Greedy(_) => AliceEngine::Greedy,
        }
    }
}

enum Bob {
    Solver(Box<SolverBob>),
    Trap(TrapBob),
}

impl Bob {
    fn engine(&mut self) -> &mut dyn BobStrategy {
        match self {
            Bob::Solver(b) => b.as_mut(),
            Bob::Trap(b) => b,
        }
    }

    fn label(&self) -> BobEngine {
        match self {
            Bob::Solver(_) => BobEngine::Solver,
            Bob::Trap(_) => BobEngine::TrapHeuristic,
        }
    }
}

pub struct Session {
    id: String,
    mode: Mode,
    state: GameState,
    alice: Option<Alice>,
    bob: Option<Bob>,
}

impl Session {
    pub fn view(&self) -> View {
        render(
            &self.id,
            self.mode,
            self.alice.as_ref().map(Alice::label),
            self.bob.as_ref().map(Bob::label),
            &self.state,
        )
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    /// Engine moves due right after creation.
    fn advance(&mut self) {
        match self.mode {
            Mode::HumanBob => {}
            Mode::HumanAlice => self.bob_premove(),
            Mode::Auto => {
                let (alice, bob) = (self.alice.as_mut().expect("auto alice"), self.bob.as_mut().expect("auto bob"));
                thue_core::game::play_out(&mut self.state, alice.engine(), bob.engine());
            }
        }
    }

    /// Lets engine-Bob place the next point if it is his turn.
    fn bob_premove(&mut self) {
        let Some(bob) = self.bob.as_mut() else { return };
        if !self.state.has_next_round() || self.state.pending().is_some() {
            return;
        }
        let name = bob.engine().name().to_owned();
        match bob.engine().choose_slot(&self.state) {
            Ok(slot) => {
                if let Err(e) = self.state.apply_bob(slot) {
                    self.state.forfeit(Player::Bob, format!("{name}: {e}"));
                }
            }
            Err(e) => self.state.forfeit(Player::Bob, format!("{name}: {e}")),
        }
    }

    /// Human Bob's move, answered at once by engine-Alice.
    pub fn bob_move(&mut self, slot: usize) -> Result<View, ServiceError> {
        if self.mode != Mode::HumanBob {
            return Err(ServiceError::BadRequest(format!(
                "bob moves are played by the engine in {:?} mode",
                self.mode
            )));
        }
        let position = self.state.apply_bob(slot)?;
        let alice = self.alice.as_mut().expect("engine alice in human-bob mode").engine();
        match alice.choose_color(&self.state, position) {
            Ok(color) => {
                if let Err(e) = self.state.apply_alice(color) {
                    let reason = format!("{}: {e}", alice.name());
                    self.state.forfeit(Player::Alice, reason);
                }
            }
            Err(e) => {
                let reason = format!("{}: {e}", alice.name());
                self.state.forfeit(Player::Alice, reason);
            }
        }
        Ok(self.view())
    }

    /// Human Alice's color for the pending point; engine-Bob then moves.
    pub fn alice_move(&mut self, color: u64) -> Result<View, ServiceError> {
        if self.mode != Mode::HumanAlice {
            return Err(ServiceError::BadRequest(format!(
                "alice moves are played by the engine in {:?} mode",
                self.mode
            )));
        }
        let q = self.state.q();
        let color =
            Symbol::try_from(color).map_err(|_| ServiceError::BadRequest(format!("color {color} is not below {q}")))?;
        self.state.apply_alice(color)?;
        self.bob_premove();
        Ok(self.view())
    }
}

/// Where engine-Alice's tables come from: a directory of prepared files
/// (`rounds-<N>.coloring`, the coloring file format), else an on-demand
/// search for short games. Tables are certified before use and cached.
pub struct ColoringSource {
    dir: Option<PathBuf>,
    cache: Mutex<HashMap<usize, Arc<Coloring>>>,
}

impl ColoringSource {
    pub fn new(dir: Option<PathBuf>) -> Self {
        ColoringSource { dir, cache: Mutex::new(HashMap::new()) }
    }

    /// Reads `THUE_COLORING_DIR`.
    pub fn from_env() -> Self {
        ColoringSource::new(std::env::var_os("THUE_COLORING_DIR").map(PathBuf::from))
    }

    pub fn file_name(rounds: usize) -> String {
        format!("rounds-{rounds}.coloring")
    }

    pub fn get(&self, rounds: usize) -> Result<Arc<Coloring>, ServiceError> {
        if let Some(c) = self.cache.lock().expect("cache lock").get(&rounds) {
            return Ok(Arc::clone(c));
        }
        let table = match self.load(rounds)? {
            Some(t) => t,
            None if rounds <= MAX_PREPARED_ROUNDS => alice::prepare(rounds, SUFFICIENT_COLORS)
                .map_err(|e| ServiceError::BadRequest(format!("no coloring for {rounds} rounds: {e}")))?,
            None => {
                return Err(ServiceError::BadRequest(format!(
                "no prepared coloring for {rounds} rounds (tables are searched on demand up to {MAX_PREPARED_ROUNDS})"
            )))
            }
        };
        let table = Arc::new(table);
        self.cache.lock().expect("cache lock").insert(rounds, Arc::clone(&table));
        Ok(table)
    }

    /// Installs a table for `rounds`-round games after certifying it.
    pub fn insert(&self, rounds: usize, table: Coloring) -> Result<(), ServiceError> {
        Self::certify(rounds, &table, "table")?;
        self.cache.lock().expect("cache lock").insert(rounds, Arc::new(table));
        Ok(())
    }

    fn certify(rounds: usize, table: &Coloring, origin: &str) -> Result<(), ServiceError> {
        let bad = |e: alice::ColoringError| ServiceError::BadRequest(format!("{origin}: {e}"));
        StrategySpec::Coloring { coloring: table.clone(), rounds }.validate().map_err(bad)?;
        if let Some(v) = alice::verify_reachable(rounds, table).map_err(bad)? {
            return Err(ServiceError::BadRequest(format!("{origin}: loses on {:?} with word {:?}", v.points, v.word)));
        }
        Ok(())
    }

    fn load(&self, rounds: usize) -> Result<Option<Coloring>, ServiceError> {
        let Some(dir) = &self.dir else { return Ok(None) };
        let path = dir.join(Self::file_name(rounds));
        let Ok(text) = std::fs::read_to_string(&path) else { return Ok(None) };
        let table = Coloring::parse(&text).map_err(|e| ServiceError::BadRequest(format!("{}: {e}", path.display())))?;
        Self::certify(rounds, &table, &path.display().to_string())?;
        Ok(Some(table))
    }
}

/// Bounded in-memory sessions with least-recently-used eviction. Each
/// session has its own lock; a request finding it held is refused as busy.
pub struct SessionStore {
    sessions: Mutex<LruCache<String, Arc<Mutex<Session>>>>,
    colorings: ColoringSource,
}

impl SessionStore {
    pub fn new(capacity: usize, colorings: ColoringSource) -> Self {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        SessionStore { sessions: Mutex::new(LruCache::new(capacity)), colorings }
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn engines(&self, mode: Mode, q: u8, rounds: usize) -> Result<(Option<Alice>, Option<Bob>), ServiceError> {
        let alice = match mode {
            Mode::HumanAlice => None,
            _ if q >= SUFFICIENT_COLORS => {
                let table = self.colorings.get(rounds)?;
                Some(Alice::Table(ColoringAlice::new((*table).clone())))
            }
            _ => Some(Alice::Greedy(GreedyAlice)),
        };
        let bob = match mode {
            Mode::HumanBob => None,
            _ if q <= MAX_SOLVER_Q => {
                let solver =
                    SolverBob::new(q, SolverConfig::default()).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
                Some(Bob::Solver(Box::new(solver)))
            }
            _ => Some(Bob::Trap(TrapBob)),
        };
        Ok((alice, bob))
    }

    fn config(mode: Mode, q: u8, rounds: usize, alice: &Option<Alice>, bob: &Option<Bob>) -> GameConfig {
        let mut config = GameConfig::new(q, rounds);
        config.alice = match alice {
            None => StrategyKind::External,
            Some(Alice::Table(_)) => StrategyKind::Coloring,
            Some(Alice::Greedy(_)) => StrategyKind::Greedy,
        };
        config.bob = match bob {
            None => StrategyKind::External,
            Some(Bob::Solver(_)) => StrategyKind::Solver,
            Some(Bob::Trap(_)) => StrategyKind::Trap,
        };
        debug_assert!(mode != Mode::Auto || (alice.is_some() && bob.is_some()));
        config
    }

    pub fn create(&self, mode: Mode, q: u64, rounds: u64) -> Result<View, ServiceError> {
        let q = u8::try_from(q).map_err(|_| ServiceError::BadRequest(format!("alphabet size {q} out of range")))?;
        let rounds = usize::try_from(rounds).unwrap_or(usize::MAX);
        if rounds > MAX_ROUNDS {
            return Err(ServiceError::BadRequest(format!("at most {MAX_ROUNDS} rounds")));
        }
        GameConfig::new(q, rounds).validate()?;
        let (alice, bob) = self.engines(mode, q, rounds)?;
        let config = Self::config(mode, q, rounds, &alice, &bob);
        let id = uuid::Uuid::new_v4().simple().to_string();
        let mut session = Session { id: id.clone(), mode, state: GameState::new(config)?, alice, bob };
        session.advance();
        let view = session.view();
        self.sessions.lock().expect("store lock").put(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    /// The view a session with this transcript shows: the moves are
    /// replayed through the referee and engine-Bob's deterministic pending
    /// move, which no transcript records, is made again. Nothing is stored.
    pub fn replay(&self, id: &str, mode: Mode, transcript: &Transcript) -> Result<View, ServiceError> {
        let TranscriptConfig { q, max_rounds } = transcript.config;
        let (alice, bob) = self.engines(mode, q, max_rounds)?;
        let replayed = transcript.replay()?;
        let config = Self::config(mode, q, max_rounds, &alice, &bob);
        let mut state = GameState::new(config)?;
        for m in replayed.history() {
            state.apply_bob(m.slot)?;
            state.apply_alice(m.color)?;
        }
        if let (Some(f), Status::Forfeit { .. }) = (&transcript.forfeit, replayed.status()) {
            state.forfeit(f.player, f.reason.clone());
        }
        let mut session = Session { id: id.to_owned(), mode, state, alice, bob };
        if mode == Mode::HumanAlice {
            session.bob_premove();
        }
        Ok(session.view())
    }

    /// Runs `f` on the session, refusing if another request holds it.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> T) -> Result<T, ServiceError> {
        let session = self
            .sessions
            .lock()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_owned()))?;
        let mut guard = match session.try_lock() {
            Ok(g) => g,
            Err(TryLockError::WouldBlock) => return Err(ServiceError::Busy(id.to_owned())),
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        Ok(f(&mut guard))
    }

    pub fn view(&self, id: &str) -> Result<View, ServiceError> {
        self.with_session(id, |s| s.view())
    }

    pub fn transcript(&self, id: &str) -> Result<Transcript, ServiceError> {
        self.with_session(id, |s| s.state.transcript())
    }

    pub fn bob_move(&self, id: &str, slot: usize) -> Result<View, ServiceError> {
        self.with_session(id, |s| s.bob_move(slot))?
    }

    pub fn alice_move(&self, id: &str, color: u64) -> Result<View, ServiceError> {
        self.with_session(id, |s| s.alice_move(color))?
    }
}
