//! Shared vocabulary for normal-play impartial games.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A normal-play impartial game: players alternate, the allowed moves depend
/// only on the position, and a player with no move loses.
pub trait Game {
    type State: Clone + Eq + Hash + Debug + Display;
    type Move: Clone + Eq + Debug + Display;

    /// All legal moves from `state`, in a deterministic order.
    fn legal_moves(&self, state: &Self::State) -> Vec<Self::Move>;

    /// Apply a move, failing if it is not legal.
    fn play(&self, state: &Self::State, mv: &Self::Move) -> Result<Self::State>;

    fn is_terminal(&self, state: &Self::State) -> bool {
        self.legal_moves(state).is_empty()
    }
}

/// One of the two players. Player 1 moves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    /// 1 or 2, the machine-format encoding.
    pub fn number(self) -> u8 {
        match self {
            Player::P1 => 1,
            Player::P2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::P1),
            2 => Some(Player::P2),
            _ => None,
        }
    }

    /// Winner of a game whose start position the first mover wins (`true`)
    /// or loses (`false`).
    pub fn from_mover_wins(mover_wins: bool) -> Player {
        if mover_wins {
            Player::P1
        } else {
            Player::P2
        }
    }
}

impl Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}", self.number())
    }
}

impl Serialize for Player {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Player {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Player::from_number(n).ok_or_else(|| serde::de::Error::custom("player must be 1 or 2"))
    }
}

/// Win/loss label for the player about to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "W")]
    Win,
    #[serde(rename = "L")]
    Loss,
}

impl Label {
    pub fn is_win(self) -> bool {
        self == Label::Win
    }
}

impl Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Win => "W",
            Label::Loss => "L",
        })
    }
}
