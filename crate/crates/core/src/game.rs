//! Referee for the online Thue game.
//!
//! Each round has two phases. Bob names a slot `0..=n` between the current
//! points; the referee resolves it to a dyadic position (`0` first, one
//! integer step beyond an extreme, the midpoint of an interior gap). Alice
//! then colors that position and the referee checks the color word, read in
//! position order, for a square through the new letter. A square ends the
//! game and stays on the board as the witness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{self, Dyadic, DyadicError};
use crate::words::{self, Alphabet, Repetition, Symbol, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the game is over")]
    GameOver,
    #[error("the round budget of {0} is used up")]
    BudgetExhausted(usize),
    #[error("a position is waiting for Alice's color")]
    AwaitingAlice,
    #[error("no position is waiting for a color")]
    NoPendingPosition,
    #[error("slot {slot} is not in 0..={len}")]
    IllegalSlot { slot: usize, len: usize },
    #[error("color {color} is not in 0..{q}")]
    ColorOutOfRange { color: Symbol, q: u8 },
    #[error("replay diverged at round {round}: {detail}")]
    ReplayMismatch { round: usize, detail: String },
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

/// Who drives a side of the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    #[default]
    External,
    Coloring,
    Greedy,
    Solver,
    Trap,
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub q: u8,
    pub max_rounds: usize,
    #[serde(default)]
    pub alice: StrategyKind,
    #[serde(default)]
    pub bob: StrategyKind,
}

impl GameConfig {
    pub fn new(q: u8, max_rounds: usize) -> GameConfig {
        GameConfig { q, max_rounds, alice: StrategyKind::External, bob: StrategyKind::External }
    }

    pub fn validate(&self) -> Result<Alphabet, GameError> {
        if self.max_rounds == 0 {
            return Err(GameError::InvalidConfig("max_rounds must be at least 1".into()));
        }
        Alphabet::new(self.q as usize).map_err(|e| GameError::InvalidConfig(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Ongoing,
    Ended { witness: Repetition },
    Forfeit { player: Player, reason: String },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Ongoing => "ongoing",
            Status::Ended { .. } => "ended",
            Status::Forfeit { .. } => "forfeit",
        }
    }
}

/// One completed round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub round: usize,
    pub slot: usize,
    pub position: Dyadic,
    pub color: Symbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pending {
    pub slot: usize,
    pub position: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    config: GameConfig,
    alphabet: Alphabet,
    points: Vec<(Dyadic, Symbol)>,
    history: Vec<Move>,
    status: Status,
    pending: Option<Pending>,
}

pub fn new_game(config: GameConfig) -> Result<GameState, GameError> {
    GameState::new(config)
}

impl GameState {
    pub fn new(config: GameConfig) -> Result<GameState, GameError> {
        let alphabet = config.validate()?;
        Ok(GameState {
            config,
            alphabet,
            points: Vec::new(),
            history: Vec::new(),
            status: Status::Ongoing,
            pending: None,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn q(&self) -> u8 {
        self.alphabet.size()
    }

    /// Colored points in increasing position order.
    pub fn points(&self) -> &[(Dyadic, Symbol)] {
        &self.points
    }

    pub fn positions(&self) -> Vec<Dyadic> {
        self.points.iter().map(|&(p, _)| p).collect()
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn pending(&self) -> Option<Pending> {
        self.pending
    }

    pub fn rounds_played(&self) -> usize {
        self.history.len()
    }

    pub fn is_ongoing(&self) -> bool {
        self.status == Status::Ongoing
    }

    /// Ongoing with budget left.
    pub fn has_next_round(&self) -> bool {
        self.is_ongoing() && self.rounds_played() < self.config.max_rounds
    }

    pub fn witness(&self) -> Option<Repetition> {
        match self.status {
            Status::Ended { witness } => Some(witness),
            _ => None,
        }
    }

    /// The colors read in increasing position order.
    pub fn word_of(&self) -> Word {
        self.points.iter().map(|&(_, c)| c).collect::<Vec<_>>().into()
    }

    fn ready_for_bob(&self) -> Result<(), GameError> {
        if !self.is_ongoing() {
            return Err(GameError::GameOver);
        }
        if self.pending.is_some() {
            return Err(GameError::AwaitingAlice);
        }
        if self.rounds_played() >= self.config.max_rounds {
            return Err(GameError::BudgetExhausted(self.config.max_rounds));
        }
        Ok(())
    }

    /// Bob's options, `0..=n` for `n` current points.
    pub fn legal_slots(&self) -> Result<Vec<usize>, GameError> {
        self.ready_for_bob()?;
        Ok((0..=self.points.len()).collect())
    }

    /// Resolves `slot` to a position and leaves it pending for Alice.
    pub fn apply_bob(&mut self, slot: usize) -> Result<Dyadic, GameError> {
        self.ready_for_bob()?;
        let n = self.points.len();
        if slot > n {
            return Err(GameError::IllegalSlot { slot, len: n });
        }
        let position = dyadic::resolve_slot(&self.positions(), slot)?;
        self.pending = Some(Pending { slot, position });
        Ok(position)
    }

    /// Colors the pending position. Returns the witness if the new letter
    /// completes a square, which also ends the game.
    pub fn apply_alice(&mut self, color: Symbol) -> Result<Option<Repetition>, GameError> {
        let Some(Pending { slot, position }) = self.pending else {
            return Err(GameError::NoPendingPosition);
        };
        if !self.alphabet.contains(color) {
            return Err(GameError::ColorOutOfRange { color, q: self.q() });
        }
        self.pending = None;
        self.points.insert(slot, (position, color));
        let round = self.history.len() + 1;
        self.history.push(Move { round, slot, position, color });
        self.check_board(round);
        let witness = words::repetition_through(&self.word_of(), slot + 1).expect("inserted index is in range");
        if let Some(witness) = witness {
            self.status = Status::Ended { witness };
        }
        Ok(witness)
    }

    /// Records a strategy failure. Clears any pending position.
    pub fn forfeit(&mut self, player: Player, reason: impl Into<String>) {
        if self.is_ongoing() {
            self.pending = None;
            self.status = Status::Forfeit { player, reason: reason.into() };
        }
    }

    /// Positions form a monotone path and every position after round `r`
    /// has depth and absolute value at most `r - 1`.
    fn check_board(&self, round: usize) {
        let positions = self.positions();
        assert_eq!(dyadic::is_monotone_path(&positions), Ok(true), "board left the graph: {positions:?}");
        let bound = round as u64 - 1;
        for p in &positions {
            assert!(p.depth() as u64 <= bound, "depth of {p} exceeds {bound}");
            assert!(p.num().unsigned_abs() <= bound << p.depth(), "{p} outside [-{bound}, {bound}]");
        }
    }

    pub fn transcript(&self) -> Transcript {
        let (witness, forfeit) = match &self.status {
            Status::Ongoing => (None, None),
            Status::Ended { witness } => (Some(*witness), None),
            Status::Forfeit { player, reason } => (None, Some(Forfeit { player: *player, reason: reason.clone() })),
        };
        Transcript {
            config: TranscriptConfig { q: self.config.q, max_rounds: self.config.max_rounds },
            moves: self.history.clone(),
            status: self.status.label().to_string(),
            witness,
            forfeit,
            final_word: self.word_of().into_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptConfig {
    pub q: u8,
    pub max_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forfeit {
    pub player: Player,
    pub reason: String,
}

/// Serializable record of a game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: TranscriptConfig,
    pub moves: Vec<Move>,
    /// `"ongoing"`, `"ended"` or `"forfeit"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Repetition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forfeit: Option<Forfeit>,
    pub final_word: Vec<Symbol>,
}

impl Transcript {
    /// Plays the recorded slots and colors through a fresh referee and
    /// checks every resolved position against the record.
    pub fn replay(&self) -> Result<GameState, GameError> {
        let mut state = GameState::new(GameConfig::new(self.config.q, self.config.max_rounds))?;
        for m in &self.moves {
            let position = state.apply_bob(m.slot)?;
            if position != m.position {
                return Err(GameError::ReplayMismatch {
                    round: m.round,
                    detail: format!("slot {} resolved to {position}, record says {}", m.slot, m.position),
                });
            }
            state.apply_alice(m.color)?;
        }
        if let Some(f) = &self.forfeit {
            state.forfeit(f.player, f.reason.clone());
        }
        if state.status().label() != self.status || state.word_of().as_slice() != self.final_word.as_slice() {
            return Err(GameError::ReplayMismatch { round: self.moves.len(), detail: "final state differs".into() });
        }
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct StrategyError(pub String);

impl From<WordError> for StrategyError {
    fn from(e: WordError) -> Self {
        StrategyError(e.to_string())
    }
}

pub trait BobStrategy {
    fn name(&self) -> &str;
    fn choose_slot(&mut self, state: &GameState) -> Result<usize, StrategyError>;
}

pub trait AliceStrategy {
    fn name(&self) -> &str;
    fn choose_color(&mut self, state: &GameState, position: Dyadic) -> Result<Symbol, StrategyError>;
}

/// Plays a fixed list of slots, then fails.
#[derive(Debug, Clone)]
pub struct ScriptedBob {
    slots: Vec<usize>,
    next: usize,
}

impl ScriptedBob {
    pub fn new(slots: Vec<usize>) -> Self {
        ScriptedBob { slots, next: 0 }
    }
}

impl BobStrategy for ScriptedBob {
    fn name(&self) -> &str {
        "scripted"
    }

    fn choose_slot(&mut self, _state: &GameState) -> Result<usize, StrategyError> {
        let slot = self.slots.get(self.next).copied().ok_or_else(|| StrategyError("script exhausted".into()))?;
        self.next += 1;
        Ok(slot)
    }
}

/// Drives both phases until the budget runs out or the game stops. A
/// strategy error or an illegal move forfeits the game for that player.
pub fn run_match(
    config: GameConfig,
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobStrategy,
) -> Result<Transcript, GameError> {
    let mut state = GameState::new(config)?;
    play_out(&mut state, alice, bob);
    Ok(state.transcript())
}

/// Continues an existing game with both engines.
pub fn play_out(state: &mut GameState, alice: &mut dyn AliceStrategy, bob: &mut dyn BobStrategy) {
    while state.has_next_round() {
        if state.pending().is_none() {
            let slot = match bob.choose_slot(state) {
                Ok(slot) => slot,
                Err(e) => return state.forfeit(Player::Bob, format!("{}: {e}", bob.name())),
            };
            if let Err(e) = state.apply_bob(slot) {
                return state.forfeit(Player::Bob, format!("{}: {e}", bob.name()));
            }
        }
        let position = state.pending().expect("bob moved").position;
        let color = match alice.choose_color(state, position) {
            Ok(color) => color,
            Err(e) => return state.forfeit(Player::Alice, format!("{}: {e}", alice.name())),
        };
        if let Err(e) = state.apply_alice(color) {
            return state.forfeit(Player::Alice, format!("{}: {e}", alice.name()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(num: i64, depth: u32) -> Dyadic {
        Dyadic::new(num, depth).unwrap()
    }

    /// Builds the board a c b c on 0, 1, 2, 3.
    fn acbc() -> GameState {
        let mut s = GameState::new(GameConfig::new(3, 10)).unwrap();
        for (slot, color) in [(0, 0), (1, 2), (2, 1), (3, 2)] {
            s.apply_bob(slot).unwrap();
            assert_eq!(s.apply_alice(color).unwrap(), None);
        }
        s
    }

    #[test]
    fn config_validation() {
        assert!(new_game(GameConfig::new(3, 5)).is_ok());
        let s = new_game(GameConfig::new(12, 20)).unwrap();
        assert_eq!(s.config().max_rounds, 20);
        assert!(s.points().is_empty());
        assert!(matches!(new_game(GameConfig::new(0, 5)), Err(GameError::InvalidConfig(_))));
        assert!(matches!(new_game(GameConfig::new(3, 0)), Err(GameError::InvalidConfig(_))));
        assert!(matches!(new_game(GameConfig::new(65, 3)), Err(GameError::InvalidConfig(_))));
    }

    #[test]
    fn slots_and_resolution() {
        let mut s = new_game(GameConfig::new(3, 10)).unwrap();
        assert_eq!(s.legal_slots().unwrap(), vec![0]);
        assert_eq!(s.apply_bob(0).unwrap(), Dyadic::ZERO);
        assert_eq!(s.legal_slots(), Err(GameError::AwaitingAlice));
        s.apply_alice(0).unwrap();
        let mut left = s.clone();
        assert_eq!(left.apply_bob(0).unwrap(), Dyadic::integer(-1));
        assert_eq!(s.apply_bob(1).unwrap(), Dyadic::integer(1));
        s.apply_alice(1).unwrap();
        assert_eq!(s.apply_bob(1).unwrap(), d(1, 1));
    }

    #[test]
    fn acbc_board_and_trap() {
        let s = acbc();
        assert_eq!(s.positions(), (0..4).map(Dyadic::integer).collect::<Vec<_>>());
        assert_eq!(s.word_of().letters(), "acbc");
        assert_eq!(s.legal_slots().unwrap(), vec![0, 1, 2, 3, 4]);
        let witnesses: Vec<_> = (0..3)
            .map(|color| {
                let mut t = s.clone();
                t.apply_bob(1).unwrap();
                let w = t.apply_alice(color).unwrap().expect("trap");
                assert_eq!(t.witness(), Some(w));
                assert_eq!(t.word_of().len(), 5);
                assert!(t.legal_slots().is_err());
                w
            })
            .collect();
        assert_eq!(
            witnesses,
            vec![Repetition { start: 0, size: 1 }, Repetition { start: 1, size: 2 }, Repetition { start: 1, size: 1 },]
        );
    }

    #[test]
    fn rejected_moves_leave_state_unchanged() {
        let mut s = acbc();
        let before = s.clone();
        assert_eq!(s.apply_bob(6), Err(GameError::IllegalSlot { slot: 6, len: 4 }));
        assert_eq!(s.apply_alice(0), Err(GameError::NoPendingPosition));
        assert_eq!(s, before);
        s.apply_bob(0).unwrap();
        let before = s.clone();
        assert_eq!(s.apply_alice(3), Err(GameError::ColorOutOfRange { color: 3, q: 3 }));
        assert_eq!(s, before);
    }

    #[test]
    fn single_round_never_ends() {
        for q in 1..=4 {
            for color in 0..q {
                let mut s = new_game(GameConfig::new(q, 1)).unwrap();
                s.apply_bob(0).unwrap();
                assert_eq!(s.apply_alice(color).unwrap(), None);
                assert!(s.is_ongoing());
                assert_eq!(s.legal_slots(), Err(GameError::BudgetExhausted(1)));
            }
        }
    }

    #[test]
    fn word_of_reads_positions_in_order() {
        assert!(new_game(GameConfig::new(3, 3)).unwrap().word_of().is_empty());
        assert_eq!(acbc().word_of().as_slice(), &[0, 2, 1, 2]);
    }

    #[test]
    fn transcript_round_trip() {
        let mut s = acbc();
        s.apply_bob(1).unwrap();
        s.apply_alice(1).unwrap();
        let t = s.transcript();
        assert_eq!(t.status, "ended");
        assert_eq!(t.witness, Some(Repetition { start: 1, size: 2 }));
        let json = t.to_json();
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.replay().unwrap(), s);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["moves"][4]["position"], serde_json::json!({"num": 1, "depth": 1}));
        assert_eq!(v["config"], serde_json::json!({"q": 3, "max_rounds": 10}));
    }

    #[test]
    fn replay_detects_tampering() {
        let mut t = acbc().transcript();
        t.moves[2].position = d(3, 1);
        assert!(matches!(t.replay(), Err(GameError::ReplayMismatch { round: 3, .. })));
    }

    struct FixedAlice(Symbol);

    impl AliceStrategy for FixedAlice {
        fn name(&self) -> &str {
            "fixed"
        }
        fn choose_color(&mut self, _: &GameState, _: Dyadic) -> Result<Symbol, StrategyError> {
            Ok(self.0)
        }
    }

    #[test]
    fn forfeits_are_recorded() {
        let t = run_match(GameConfig::new(3, 4), &mut FixedAlice(7), &mut ScriptedBob::new(vec![0])).unwrap();
        assert_eq!(t.status, "forfeit");
        assert_eq!(t.forfeit.as_ref().unwrap().player, Player::Alice);
        let t = run_match(GameConfig::new(3, 4), &mut FixedAlice(0), &mut ScriptedBob::new(vec![0, 5])).unwrap();
        assert_eq!(t.forfeit.as_ref().unwrap().player, Player::Bob);
        assert_eq!(t.moves.len(), 1);
        assert_eq!(t.replay().unwrap().status().label(), "forfeit");
    }

    #[test]
    fn repetition_loss_is_not_a_forfeit() {
        let t = run_match(GameConfig::new(3, 4), &mut FixedAlice(0), &mut ScriptedBob::new(vec![0, 1])).unwrap();
        assert_eq!(t.status, "ended");
        assert_eq!(t.final_word, vec![0, 0]);
        assert_eq!(t.witness, Some(Repetition { start: 0, size: 1 }));
    }
}
