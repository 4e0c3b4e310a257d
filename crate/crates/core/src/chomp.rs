//! Reversed Chomp on an `N x M` board.
//!
//! A position is the filled region, a staircase stored as nonincreasing
//! column heights. The game starts with only the poisoned corner filled and
//! ends at the full board. A reversed move goes from `S` to `S'` exactly
//! when eating one square of `S'` (other than the corner) in forward Chomp
//! leaves `S`.
//!
//! Boards are normalized so that `rows >= cols`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, Player};
use crate::graph::GameGraph;
use crate::strategies::Policy;

/// Largest supported side length.
pub const MAX_SIDE: usize = 16;

/// Largest side accepted by [`chomp_solve`].
pub const MAX_SOLVE_SIDE: usize = 7;

/// A staircase fill of an `rows x cols` board.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChompBoard {
    pub rows: usize,
    pub cols: usize,
    heights: Vec<u8>,
}

/// A reversed move, named by the successor's column heights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChompMove {
    pub heights: Vec<u8>,
}

impl fmt::Display for ChompMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.heights)
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<(usize, usize)> {
    if rows == 0 || cols == 0 || rows > MAX_SIDE || cols > MAX_SIDE {
        return Err(Error::Domain(format!(
            "board {rows}x{cols} must have sides in 1..={MAX_SIDE}"
        )));
    }
    Ok(if rows >= cols {
        (rows, cols)
    } else {
        (cols, rows)
    })
}

impl ChompBoard {
    /// Only the poisoned corner filled. Dimensions are swapped if needed so
    /// that `rows >= cols`.
    pub fn initial(rows: usize, cols: usize) -> Result<ChompBoard> {
        let (rows, cols) = check_dims(rows, cols)?;
        let mut heights = vec![0u8; cols];
        heights[0] = 1;
        Ok(ChompBoard {
            rows,
            cols,
            heights,
        })
    }

    /// A board from column heights (left to right), already with `rows >= cols`.
    pub fn with_heights(rows: usize, cols: usize, heights: Vec<u8>) -> Result<ChompBoard> {
        if rows < cols {
            return Err(Error::Domain(format!(
                "expected rows >= cols, got {rows}x{cols}"
            )));
        }
        check_dims(rows, cols)?;
        if heights.len() != cols {
            return Err(Error::Domain(format!(
                "expected {cols} column heights, got {}",
                heights.len()
            )));
        }
        if heights[0] == 0 {
            return Err(Error::Domain("the poisoned corner is always filled".into()));
        }
        if heights.iter().any(|&h| h as usize > rows) || heights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Domain(format!(
                "heights {heights:?} are not a staircase within {rows} rows"
            )));
        }
        Ok(ChompBoard {
            rows,
            cols,
            heights,
        })
    }

    pub fn heights(&self) -> &[u8] {
        &self.heights
    }

    pub fn is_full(&self) -> bool {
        self.heights.iter().all(|&h| h as usize == self.rows)
    }

    fn with(&self, heights: Vec<u8>) -> ChompBoard {
        ChompBoard {
            rows: self.rows,
            cols: self.cols,
            heights,
        }
    }

    /// Forward Chomp: eat square `(col, row)` and everything above and to
    /// its right.
    pub fn eat(&self, col: usize, row: usize) -> Option<ChompBoard> {
        if (col, row) == (0, 0) || col >= self.cols || row >= self.heights[col] as usize {
            return None;
        }
        let mut h = self.heights.clone();
        for x in h.iter_mut().skip(col) {
            *x = (*x).min(row as u8);
        }
        Some(self.with(h))
    }

    /// All forward eats, excluding the poisoned corner.
    pub fn forward_successors(&self) -> Vec<ChompBoard> {
        let mut out = Vec::new();
        for col in 0..self.cols {
            for row in 0..self.heights[col] as usize {
                if let Some(b) = self.eat(col, row) {
                    out.push(b);
                }
            }
        }
        out
    }

    /// Every staircase on this board containing the poisoned corner.
    pub fn all_staircases(rows: usize, cols: usize) -> Result<Vec<ChompBoard>> {
        let base = ChompBoard::initial(rows, cols)?;
        let mut out = Vec::new();
        let mut h = vec![0u8; base.cols];
        fn rec(base: &ChompBoard, h: &mut Vec<u8>, col: usize, cap: u8, out: &mut Vec<ChompBoard>) {
            if col == base.cols {
                out.push(base.with(h.clone()));
                return;
            }
            let lo = if col == 0 { 1 } else { 0 };
            for v in lo..=cap {
                h[col] = v;
                rec(base, h, col + 1, v, out);
            }
        }
        rec(&base, &mut h, 0, base.rows as u8, &mut out);
        Ok(out)
    }

    /// The square a single eat of `larger` must use to reach `self`, if any
    /// eat does: the lowest removed square of the leftmost changed column.
    fn eaten_from(&self, larger: &ChompBoard) -> Option<(usize, usize)> {
        let col = (0..self.cols).find(|&c| larger.heights[c] != self.heights[c])?;
        let row = self.heights[col] as usize;
        (larger.eat(col, row).as_ref() == Some(self)).then_some((col, row))
    }

    /// Reversed moves found by inverting forward eats: every staircase
    /// strictly containing this one from which a single eat leads back here.
    pub fn moves(&self) -> Vec<ChompMove> {
        fn rec(s: &ChompBoard, h: &mut Vec<u8>, col: usize, cap: u8, out: &mut Vec<ChompMove>) {
            if col == s.cols {
                let cand = s.with(h.clone());
                if s.eaten_from(&cand).is_some() {
                    out.push(ChompMove { heights: h.clone() });
                }
                return;
            }
            for v in s.heights[col]..=cap {
                h[col] = v;
                rec(s, h, col + 1, v, out);
            }
        }
        let mut out = Vec::new();
        let mut h = self.heights.clone();
        rec(self, &mut h, 0, self.rows as u8, &mut out);
        out.sort_by(|a, b| a.heights.cmp(&b.heights));
        out
    }

    /// Reversed moves from the direct description: pick a column `c` with
    /// height `r - 1` and raise a contiguous run of columns starting at `c`,
    /// all of height `r - 1`, to new nonincreasing heights of at least `r`
    /// (bounded by the column left of the run).
    pub fn moves_direct(&self) -> Vec<ChompMove> {
        let mut out = Vec::new();
        for c in 0..self.cols {
            let base = self.heights[c];
            if base as usize >= self.rows {
                continue;
            }
            let cap = if c == 0 {
                self.rows as u8
            } else {
                self.heights[c - 1]
            };
            if cap <= base {
                continue;
            }
            let mut end = c;
            while end + 1 < self.cols && self.heights[end + 1] == base {
                end += 1;
            }
            let mut h = self.heights.clone();
            raise_run(&mut h, c, end, base, cap, &mut out);
        }
        out.sort_by(|a, b| a.heights.cmp(&b.heights));
        out
    }

    /// Apply a reversed move after checking that it is legal.
    pub fn apply(&self, mv: &ChompMove) -> Result<ChompBoard> {
        let next = self.with(mv.heights.clone());
        let legal = mv.heights.len() == self.cols
            && mv.heights.iter().zip(&self.heights).all(|(a, b)| a >= b)
            && mv.heights != self.heights
            && mv.heights.windows(2).all(|w| w[1] <= w[0])
            && mv.heights.iter().all(|&h| h as usize <= self.rows)
            && self.eaten_from(&next).is_some();
        if !legal {
            return Err(Error::IllegalMove {
                mv: mv.to_string(),
                state: self.to_string(),
                reason: "no single eaten square turns the target back into this board".into(),
            });
        }
        Ok(next)
    }

    /// The region not yet pinned by full columns and full rows:
    /// `(first column, first row, columns, rows)`.
    fn residual(&self) -> (usize, usize, usize, usize) {
        let full_cols = self
            .heights
            .iter()
            .take_while(|&&h| h as usize == self.rows)
            .count();
        let full_rows = *self.heights.last().expect("at least one column") as usize;
        (
            full_cols,
            full_rows,
            self.cols - full_cols,
            self.rows - full_rows,
        )
    }

    /// True when one move fills the whole board.
    pub fn completable(&self) -> bool {
        if self.is_full() {
            return false;
        }
        let (full_cols, _, _, _) = self.residual();
        let rest = &self.heights[full_cols..];
        rest.iter().all(|&h| h == rest[0])
    }

    /// The residual region is a fresh sub-board: one filled corner and
    /// nothing else. Returns its `(rows, cols)`.
    pub fn residual_is_fresh(&self) -> Option<(usize, usize)> {
        let (c0, r0, cols, rows) = self.residual();
        if cols == 0 {
            return None;
        }
        let local: Vec<usize> = self.heights[c0..]
            .iter()
            .map(|&h| h as usize - r0)
            .collect();
        (local[0] == 1 && local[1..].iter().all(|&h| h == 0)).then_some((rows, cols))
    }
}

fn raise_run(h: &mut Vec<u8>, c: usize, end: usize, base: u8, cap: u8, out: &mut Vec<ChompMove>) {
    // Column c must rise; each following column of the run may rise (to at
    // most its left neighbour) or stop the run.
    for top in base + 1..=cap {
        h[c] = top;
        out.push(ChompMove { heights: h.clone() });
        if c < end {
            raise_run(h, c + 1, end, base, top, out);
        }
    }
    h[c] = base;
}

impl fmt::Display for ChompBoard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}{:?}", self.rows, self.cols, self.heights)
    }
}

impl fmt::Debug for ChompBoard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Reversed Chomp as a [`Game`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ReversedChomp;

impl Game for ReversedChomp {
    type State = ChompBoard;
    type Move = ChompMove;

    fn legal_moves(&self, state: &ChompBoard) -> Vec<ChompMove> {
        state.moves()
    }

    fn play(&self, state: &ChompBoard, mv: &ChompMove) -> Result<ChompBoard> {
        state.apply(mv)
    }

    fn is_terminal(&self, state: &ChompBoard) -> bool {
        state.is_full()
    }
}

/// Winner of reversed Chomp on a `rows x cols` board under optimal play.
pub fn chomp_solve(rows: usize, cols: usize) -> Result<Player> {
    let start = ChompBoard::initial(rows, cols)?;
    if start.rows == 1 {
        return Err(Error::Domain("the 1x1 game is trivial".into()));
    }
    if start.rows > MAX_SOLVE_SIDE {
        return Err(Error::Range {
            what: "board side",
            value: start.rows as u64,
            range: "1..=7",
        });
    }
    let g = GameGraph::from_game(&ReversedChomp, start, None)?;
    Ok(Player::from_mover_wins(g.labels()[0].is_win()))
}

/// The constructive strategy: complete the board whenever one move can;
/// otherwise answer a partial bottom row of length `l` in the residual
/// region by filling its leftmost `l - 1` columns, and a partial left column
/// of height `h` by filling its bottom `h - 1` rows.
///
/// For one-column boards this is the first player's single winning move;
/// for two or more columns it is the second player's reply to each move.
pub fn chomp_strategy(state: &ChompBoard) -> Result<ChompMove> {
    if state.is_full() {
        return Err(Error::Strategy("the board is already full".into()));
    }
    if state.completable() {
        return Ok(ChompMove {
            heights: vec![state.rows as u8; state.cols],
        });
    }
    let (c0, r0, cols, _rows) = state.residual();
    let local: Vec<usize> = state.heights[c0..]
        .iter()
        .map(|&h| h as usize - r0)
        .collect();
    let outside = || Error::Strategy(format!("{state} is not a position this strategy reaches"));
    let mut h = state.heights.clone();
    if local[0] >= 2 && local[1..].iter().all(|&x| x == 0) {
        // Partial left column of height local[0].
        let fill = (r0 + local[0] - 1) as u8;
        for x in h.iter_mut().skip(c0 + 1) {
            *x = fill;
        }
    } else if local[0] == 1 {
        let len = local.iter().take_while(|&&x| x == 1).count();
        if len < 2 || len >= cols || local[len..].iter().any(|&x| x != 0) {
            return Err(outside());
        }
        // Partial bottom row of length len.
        for x in h.iter_mut().skip(c0).take(len - 1) {
            *x = state.rows as u8;
        }
    } else {
        return Err(outside());
    }
    Ok(ChompMove { heights: h })
}

/// [`chomp_strategy`] as a policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChompPolicy;

impl Policy<ReversedChomp> for ChompPolicy {
    fn choose(
        &mut self,
        _: &ReversedChomp,
        state: &ChompBoard,
        _: Option<&ChompMove>,
    ) -> Result<ChompMove> {
        chomp_strategy(state)
    }
}
