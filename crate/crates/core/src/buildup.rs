//! The build-up 1-2-3 game.
//!
//! Players alternately put down a 1, 2 or 3 (never more than what is left)
//! until the total is exactly `n`. The pile of ones, twos and threes is then
//! played as a reversed Zeckendorf game, and the player who did not place
//! last moves first. Both phases together form one normal-play game.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, Player};
use crate::graph::GameGraph;
use crate::state::Move;
use crate::strategies::{strategy123, Policy, Ternary};

/// Largest `n` accepted by [`buildup_exhaustive`].
pub const MAX_EXHAUSTIVE: u32 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Placing,
    Playing,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BuildUpState {
    pub phase: Phase,
    /// Chips worth 1, 2 and 3.
    pub triple: Ternary,
    pub remaining: u32,
    pub to_move: Player,
    pub last_placed: Option<u32>,
}

impl BuildUpState {
    pub fn new(n: u32) -> Result<BuildUpState> {
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        Ok(BuildUpState {
            phase: Phase::Placing,
            triple: Ternary::new(0, 0, 0),
            remaining: n,
            to_move: Player::P1,
            last_placed: None,
        })
    }

    pub fn n(&self) -> u64 {
        self.triple.value() + u64::from(self.remaining)
    }
}

impl fmt::Display for BuildUpState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Phase::Placing => write!(
                f,
                "placing {} with {} left, {} to move",
                self.triple, self.remaining, self.to_move
            ),
            Phase::Playing => write!(f, "playing {}, {} to move", self.triple, self.to_move),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuildUpMove {
    Place(u32),
    Play(Move),
}

impl fmt::Display for BuildUpMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildUpMove::Place(v) => write!(f, "Place({v})"),
            BuildUpMove::Play(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildUpGame;

impl Game for BuildUpGame {
    type State = BuildUpState;
    type Move = BuildUpMove;

    fn legal_moves(&self, s: &BuildUpState) -> Vec<BuildUpMove> {
        match s.phase {
            Phase::Placing => (1..=s.remaining.min(3)).map(BuildUpMove::Place).collect(),
            Phase::Playing => s
                .triple
                .to_state()
                .map(|g| g.legal_moves().into_iter().map(BuildUpMove::Play).collect())
                .unwrap_or_default(),
        }
    }

    fn play(&self, s: &BuildUpState, mv: &BuildUpMove) -> Result<BuildUpState> {
        let illegal = |reason: &str| Error::IllegalMove {
            mv: mv.to_string(),
            state: s.to_string(),
            reason: reason.into(),
        };
        let mut next = s.clone();
        next.to_move = s.to_move.other();
        match (*mv, s.phase) {
            (BuildUpMove::Place(v), Phase::Placing) => {
                if !(1..=3).contains(&v) {
                    return Err(illegal("placements are 1, 2 or 3"));
                }
                if v > s.remaining {
                    return Err(illegal("placement exceeds what is left"));
                }
                match v {
                    1 => next.triple.ones += 1,
                    2 => next.triple.twos += 1,
                    _ => next.triple.threes += 1,
                }
                next.remaining -= v;
                next.last_placed = Some(v);
                if next.remaining == 0 {
                    next.phase = Phase::Playing;
                }
            }
            (BuildUpMove::Play(m), Phase::Playing) => {
                next.triple = s.triple.apply(m)?;
            }
            (BuildUpMove::Place(_), Phase::Playing) => return Err(illegal("placing is over")),
            (BuildUpMove::Play(_), Phase::Placing) => {
                return Err(illegal("placing is not finished"))
            }
        }
        Ok(next)
    }
}

/// Winner under optimal play: P1 for `n = 4` and odd `n`, P2 otherwise.
pub fn buildup_winner(n: u32) -> Result<Player> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    Ok(if n == 4 || n % 2 == 1 {
        Player::P1
    } else {
        Player::P2
    })
}

/// Winner by exhaustive search over both phases.
pub fn buildup_exhaustive(n: u32) -> Result<Player> {
    if n > MAX_EXHAUSTIVE {
        return Err(Error::Range {
            what: "n",
            value: u64::from(n),
            range: "1..=25",
        });
    }
    let g = GameGraph::from_game(&BuildUpGame, BuildUpState::new(n)?, None)?;
    Ok(Player::from_mover_wins(g.labels()[0].is_win()))
}

/// The nim-down strategy for the winning side of `n`.
#[derive(Debug, Clone, Copy)]
pub struct BuildUpPolicy {
    n: u32,
    side: Player,
}

pub fn buildup_policy(n: u32) -> Result<BuildUpPolicy> {
    Ok(BuildUpPolicy {
        n,
        side: buildup_winner(n)?,
    })
}

impl BuildUpPolicy {
    /// A policy for `side`, failing unless that side wins `n`.
    pub fn for_side(n: u32, side: Player) -> Result<BuildUpPolicy> {
        let p = buildup_policy(n)?;
        if p.side != side {
            return Err(Error::Strategy(format!(
                "{side} loses the build-up game for n = {n}"
            )));
        }
        Ok(p)
    }

    pub fn side(&self) -> Player {
        self.side
    }

    fn place(&self, s: &BuildUpState) -> Result<u32> {
        let n = self.n;
        let r = s.remaining;
        let Some(v) = s.last_placed else {
            return match n {
                1 => Ok(1),
                4 => Ok(3),
                5 => Ok(2),
                _ if n % 4 == 3 => Ok(2),
                _ if n % 4 == 1 => Ok(3),
                _ => Err(Error::Strategy(format!("no opening for n = {n}"))),
            };
        };
        if r == 1 {
            return Ok(1);
        }
        let pre = r + v;
        // Triple before the opponent's last placement.
        let (a_pre, c_pre) = (
            s.triple.ones - u32::from(v == 1),
            s.triple.threes - u32::from(v == 3),
        );
        let unreached = || Error::Strategy(format!("nim-down never reaches {s} for n = {n}"));
        let out = match n % 4 {
            _ if n == 2 || n == 5 => match (pre, v) {
                (2, 1) => 1,
                (3, 1 | 2) => 3 - v,
                _ => return Err(unreached()),
            },
            3 if pre >= 5 => 4 - v,
            0 => match (pre, v) {
                (p, _) if p >= 12 => 4 - v,
                (8, 1 | 3) if c_pre % 2 == 0 => 4 - v,
                (8, 2) if c_pre % 2 == 0 => 1,
                (8, 1) => 2,
                (8, _) => 5 - v,
                (4, 1 | 3) | (5, 1 | 3) => 4 - v,
                (4, 2) => 1,
                (5, 2) => 2,
                (3, 1 | 2) => 3 - v,
                _ => return Err(unreached()),
            },
            2 => match (pre, v) {
                (p, _) if p >= 10 => 4 - v,
                (6, 1) if a_pre % 2 == 1 => 3,
                (6, 1) => 2,
                (6, _) => 5 - v,
                (2, 1) => 1,
                (3, 1 | 2) => 3 - v,
                _ => return Err(unreached()),
            },
            1 => match (pre, v) {
                (p, _) if p >= 10 => 4 - v,
                (6, 1) if a_pre % 2 == 1 => 2,
                (6, 1) => 3,
                (6, _) => 5 - v,
                (3, 1 | 2) => 3 - v,
                _ => return Err(unreached()),
            },
            _ => return Err(unreached()),
        };
        Ok(out)
    }
}

impl Policy<BuildUpGame> for BuildUpPolicy {
    fn choose(
        &mut self,
        _: &BuildUpGame,
        s: &BuildUpState,
        _: Option<&BuildUpMove>,
    ) -> Result<BuildUpMove> {
        if s.to_move != self.side {
            return Err(Error::Strategy(format!(
                "{} is not to move at {s}",
                self.side
            )));
        }
        match s.phase {
            Phase::Placing => self.place(s).map(BuildUpMove::Place),
            Phase::Playing => strategy123(&s.triple).map(BuildUpMove::Play),
        }
    }
}
