//! The online Thue game: Bob picks a gap in a sequence, Alice fills it with
//! a letter, and Alice loses as soon as the sequence contains a square.
//!
//! Positions live on the dyadic rationals ([`dyadic`]); the referee
//! ([`game`]) applies moves and detects squares ([`words`]). Alice's
//! coloring strategies and their verifiers are in [`alice`], and [`solver`]
//! computes exact game values for small alphabets.

pub mod alice;
pub mod dyadic;
pub mod game;
pub mod solver;
pub mod words;

pub use alice::{Coloring, ColoringError};
pub use dyadic::{Dyadic, DyadicError, Truncation};
pub use game::{GameConfig, GameError, GameState, Transcript};
pub use solver::{GameValue, SolveOutcome, SolverConfig, SolverError};
pub use words::{Alphabet, Repetition, Symbol, Word};
