//! Positions and moves of the reversed Zeckendorf game.
//!
//! A position is a partition of `n` into Fibonacci numbers, stored as bin
//! heights `h_1, h_2, ...` (bin `i` holds chips worth `F_i`). Bins are
//! numbered from 1 everywhere in the public API.
//!
//! Reversed moves:
//!
//! ```text
//! Split(j),   j >= 3 : F_j           -> F_{j-1} + F_{j-2}
//! Split(2)           : F_2           -> 2 F_1
//! Combine(i), i >= 3 : F_{i+1} + F_{i-2} -> 2 F_i
//! Combine(2)         : F_3 + F_1     -> 2 F_2
//! ```
//!
//! The forward moves are kept only to check that the reversed game is the
//! edge transposition of the forward one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fib::{self, MAX_INDEX};
use crate::game::Game;

/// A canonical position: no trailing empty bins and at least one chip.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState {
    heights: Vec<u32>,
}

impl GameState {
    /// Build a canonical state from heights listed low bin first.
    pub fn new(mut heights: Vec<u32>) -> Result<GameState> {
        while heights.last() == Some(&0) {
            heights.pop();
        }
        if heights.is_empty() {
            return Err(Error::Domain(
                "state has no chips (n = 0 is unsupported)".into(),
            ));
        }
        if heights.len() > MAX_INDEX {
            return Err(Error::Range {
                what: "bin count",
                value: heights.len() as u64,
                range: "1..=90",
            });
        }
        // The game ends with every chip in bin 1, so the value must fit a height.
        let value: u128 = heights
            .iter()
            .enumerate()
            .map(|(i, &h)| u128::from(fib::fib(i + 1).expect("bin count checked")) * u128::from(h))
            .sum();
        if value > u128::from(u32::MAX) {
            return Err(Error::Range {
                what: "state value",
                value: u64::try_from(value).unwrap_or(u64::MAX),
                range: "1..=4294967295",
            });
        }
        Ok(GameState { heights })
    }

    /// The Zeckendorf decomposition of `n`, the usual starting position.
    pub fn zeckendorf(n: u64) -> Result<GameState> {
        GameState::new(fib::zeckendorf(n)?)
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    /// Height of 1-based bin `i`; zero beyond the last bin.
    #[inline]
    pub fn height(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.heights.get(i - 1).copied().unwrap_or(0)
    }

    /// Number of bins up to the highest occupied one.
    pub fn len(&self) -> usize {
        self.heights.len()
    }

    /// Always false: canonical states hold at least one chip.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> u64 {
        fib::value_of(&self.heights)
    }

    pub fn chips(&self) -> u64 {
        self.heights.iter().map(|&h| u64::from(h)).sum()
    }

    /// True when every chip sits in bin 1: no reversed move remains.
    pub fn is_terminal(&self) -> bool {
        self.heights.len() == 1
    }

    pub fn all_even(&self) -> bool {
        self.heights.iter().all(|h| h % 2 == 0)
    }

    pub fn potential(&self) -> Potential {
        let chips = self.chips();
        let weighted = self
            .heights
            .iter()
            .enumerate()
            .map(|(i, &h)| (i as u64 + 1) * u64::from(h))
            .sum();
        Potential {
            chips,
            weighted,
            lifted: chips - u64::from(self.heights[0]),
        }
    }

    /// Legal reversed moves: splits by ascending bin, then combines by
    /// ascending destination bin.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::with_capacity(2 * self.heights.len());
        self.for_each_move(|m| moves.push(m));
        moves
    }

    #[inline]
    pub(crate) fn for_each_move(&self, mut f: impl FnMut(Move)) {
        let k = self.heights.len();
        for j in 2..=k {
            if self.heights[j - 1] > 0 {
                f(Move::Split(j));
            }
        }
        // Combine(i) draws from bin i+1, so i + 1 <= k.
        for i in 2..k {
            let low = if i == 2 { 1 } else { i - 2 };
            if self.heights[i] > 0 && self.heights[low - 1] > 0 {
                f(Move::Combine(i));
            }
        }
    }

    /// Why `mv` is illegal here, if it is.
    fn check(&self, mv: Move) -> Option<String> {
        match mv {
            Move::Split(j) if j < 2 => Some("split index must be at least 2".into()),
            Move::Split(j) => (self.height(j) == 0).then(|| format!("h_{j} = 0")),
            Move::Combine(i) if i < 2 => Some("combine index must be at least 2".into()),
            Move::Combine(i) => {
                let low = if i == 2 { 1 } else { i - 2 };
                if self.height(i + 1) == 0 {
                    Some(format!("h_{} = 0", i + 1))
                } else if self.height(low) == 0 {
                    Some(format!("h_{low} = 0"))
                } else {
                    None
                }
            }
        }
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        self.check(mv).is_none()
    }

    /// Apply a reversed move.
    pub fn apply(&self, mv: Move) -> Result<GameState> {
        if let Some(reason) = self.check(mv) {
            return Err(Error::IllegalMove {
                mv: mv.to_string(),
                state: self.to_string(),
                reason,
            });
        }
        Ok(self.apply_unchecked(mv))
    }

    /// Apply a move already known to be legal.
    #[inline]
    pub(crate) fn apply_unchecked(&self, mv: Move) -> GameState {
        let mut h = self.heights.clone();
        match mv {
            Move::Split(2) => {
                h[1] -= 1;
                h[0] += 2;
            }
            Move::Split(j) => {
                h[j - 1] -= 1;
                h[j - 2] += 1;
                h[j - 3] += 1;
            }
            Move::Combine(i) => {
                let low = if i == 2 { 1 } else { i - 2 };
                h[i] -= 1;
                h[low - 1] -= 1;
                h[i - 1] += 2;
            }
        }
        while h.last() == Some(&0) {
            h.pop();
        }
        GameState { heights: h }
    }

    /// Successor states in move order.
    pub fn successors(&self) -> Vec<GameState> {
        let mut out = Vec::new();
        self.for_each_move(|m| out.push(self.apply_unchecked(m)));
        out
    }

    /// Legal moves of the forward game, in a deterministic order.
    pub fn legal_moves_forward(&self) -> Vec<ForwardMove> {
        let k = self.heights.len();
        let mut moves = Vec::new();
        if self.height(1) >= 2 {
            moves.push(ForwardMove::Combine(1));
        }
        for i in 2..=k {
            if self.height(i) > 0 && self.height(i - 1) > 0 {
                moves.push(ForwardMove::Combine(i));
            }
        }
        for i in 2..=k {
            if self.height(i) >= 2 {
                moves.push(ForwardMove::Split(i));
            }
        }
        moves
    }

    /// Apply a forward move (legality is the caller's responsibility in
    /// tests; illegal moves are rejected).
    pub fn apply_forward(&self, mv: ForwardMove) -> Result<GameState> {
        if !self.legal_moves_forward().contains(&mv) {
            return Err(Error::IllegalMove {
                mv: format!("{mv:?}"),
                state: self.to_string(),
                reason: "forward move precondition fails".into(),
            });
        }
        let mut h = self.heights.clone();
        h.resize(self.heights.len() + 1, 0);
        match mv {
            ForwardMove::Combine(1) => {
                h[0] -= 2;
                h[1] += 1;
            }
            ForwardMove::Combine(i) => {
                h[i - 1] -= 1;
                h[i - 2] -= 1;
                h[i] += 1;
            }
            ForwardMove::Split(2) => {
                h[1] -= 2;
                h[2] += 1;
                h[0] += 1;
            }
            ForwardMove::Split(i) => {
                h[i - 1] -= 2;
                h[i - 3] += 1;
                h[i] += 1;
            }
        }
        GameState::new(h)
    }

    pub fn forward_successors(&self) -> Vec<GameState> {
        self.legal_moves_forward()
            .into_iter()
            .map(|m| self.apply_forward(m).expect("generated move is legal"))
            .collect()
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.heights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Parses the comma-separated, low-bin-first encoding, e.g. `"0,1,0,1"`.
impl FromStr for GameState {
    type Err = Error;

    fn from_str(s: &str) -> Result<GameState> {
        let heights = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad height {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GameState::new(heights)
    }
}

impl Serialize for GameState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GameState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonicalize a raw height vector.
pub fn canonical(heights: &[u32]) -> Result<GameState> {
    GameState::new(heights.to_vec())
}

/// A reversed-game move, keyed by bin index (1-based).
///
/// `Split(j)` breaks one chip of bin `j`; `Combine(i)` produces two chips in
/// bin `i` from bins `i+1` and `i-2` (bin 1 when `i = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "MoveRepr", try_from = "MoveRepr")]
pub enum Move {
    Split(usize),
    Combine(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MoveKind {
    Split,
    Combine,
}

#[derive(Serialize, Deserialize)]
struct MoveRepr {
    #[serde(rename = "type")]
    kind: MoveKind,
    index: usize,
}

impl From<Move> for MoveRepr {
    fn from(m: Move) -> MoveRepr {
        match m {
            Move::Split(j) => MoveRepr {
                kind: MoveKind::Split,
                index: j,
            },
            Move::Combine(i) => MoveRepr {
                kind: MoveKind::Combine,
                index: i,
            },
        }
    }
}

impl TryFrom<MoveRepr> for Move {
    type Error = String;

    fn try_from(r: MoveRepr) -> std::result::Result<Move, String> {
        if r.index < 2 {
            return Err(format!("move index must be at least 2, got {}", r.index));
        }
        Ok(match r.kind {
            MoveKind::Split => Move::Split(r.index),
            MoveKind::Combine => Move::Combine(r.index),
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Split(j) => write!(f, "Split({j})"),
            Move::Combine(i) => write!(f, "Combine({i})"),
        }
    }
}

/// Accepts `Split(3)`, `split 3`, `s3`, `combine(2)`, `c2` and similar.
impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Move> {
        let t = s.trim().to_ascii_lowercase();
        let (kind, rest) = if let Some(r) = t.strip_prefix("split") {
            ("s", r)
        } else if let Some(r) = t.strip_prefix("combine") {
            ("c", r)
        } else if let Some(r) = t.strip_prefix('s') {
            ("s", r)
        } else if let Some(r) = t.strip_prefix('c') {
            ("c", r)
        } else {
            return Err(Error::Parse(format!("unrecognized move {s:?}")));
        };
        let digits = rest.trim_matches(|c: char| c == '(' || c == ')' || c.is_whitespace());
        let index: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad move index in {s:?}")))?;
        if index < 2 {
            return Err(Error::Parse(format!(
                "move index must be at least 2 in {s:?}"
            )));
        }
        Ok(if kind == "s" {
            Move::Split(index)
        } else {
            Move::Combine(index)
        })
    }
}

/// Forward-game moves: `Combine(i)` is `F_{i-1} + F_i -> F_{i+1}` (`i = 1`
/// meaning `2F_1 -> F_2`), `Split(i)` is `2F_i -> F_{i-2} + F_{i+1}` (`i = 2`
/// meaning `2F_2 -> F_3 + F_1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForwardMove {
    Combine(usize),
    Split(usize),
}

/// Termination witness, compared lexicographically: every reversed move
/// strictly increases it. Splits add a chip; combines keep the chip count
/// and raise the index-weighted sum, except `Combine(2)` which keeps both
/// and moves one chip out of bin 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Potential {
    pub chips: u64,
    pub weighted: u64,
    /// Chips outside bin 1.
    pub lifted: u64,
}

/// The reversed Zeckendorf game as a [`Game`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ReversedZeckendorf;

impl Game for ReversedZeckendorf {
    type State = GameState;
    type Move = Move;

    fn legal_moves(&self, state: &GameState) -> Vec<Move> {
        state.legal_moves()
    }

    fn play(&self, state: &GameState, mv: &Move) -> Result<GameState> {
        state.apply(*mv)
    }

    fn is_terminal(&self, state: &GameState) -> bool {
        state.is_terminal()
    }
}
