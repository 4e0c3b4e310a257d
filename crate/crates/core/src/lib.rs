//! Engine, exhaustive solver and strategy oracles for the reversed
//! Zeckendorf game, the build-up 1-2-3 game and reversed Chomp.
//!
//! Positions of the Zeckendorf game are partitions of `n` into Fibonacci
//! numbers (indexed `F_1 = 1, F_2 = 2`). The reversed game starts at the
//! Zeckendorf decomposition of `n`, breaks chips apart, and ends when every
//! chip is a one; the player who cannot move loses.

pub mod buildup;
pub mod chomp;
pub mod error;
pub mod fib;
pub mod game;
pub mod graph;
pub mod randomplay;
pub mod solver;
pub mod state;
pub mod strategies;

pub use error::{Error, Result};
pub use game::{Game, Label, Player};
pub use state::{GameState, Move, Potential, ReversedZeckendorf};
