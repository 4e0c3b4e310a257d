//! Exhaustive solver for the reversed Zeckendorf game.
//!
//! The reachable graph from a start position is built once, then labeled in
//! a single post-order pass: a state is a win for the mover iff some move
//! reaches a loss. The game is acyclic because every move raises the
//! [`Potential`](crate::state::Potential).

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Arc};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fib::{decomposition_stats, MAX_VALUE};
use crate::game::{Label, Player};
use crate::graph::GameGraph;
use crate::state::{GameState, Move};

/// A fully solved game from one start position.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub n: u64,
    pub start: GameState,
    pub winner: Player,
    pub edge_count: u64,
    pub vertex_count: u64,
    graph: GameGraph<GameState>,
    labels: Vec<Label>,
}

impl SolveResult {
    pub fn graph(&self) -> &GameGraph<GameState> {
        &self.graph
    }

    pub fn label(&self, state: &GameState) -> Option<Label> {
        self.graph.id_of(state).map(|id| self.labels[id as usize])
    }

    pub fn label_of_id(&self, id: u32) -> Label {
        self.labels[id as usize]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn contains(&self, state: &GameState) -> bool {
        self.graph.id_of(state).is_some()
    }
}

/// Solve from an arbitrary valid start state.
pub fn solve(start: &GameState) -> SolveResult {
    solve_with_limit(start, None).expect("no limit was set")
}

/// Solve, giving up once the graph grows past `max_vertices`.
pub fn solve_with_limit(start: &GameState, max_vertices: Option<usize>) -> Result<SolveResult> {
    let graph = GameGraph::explore(
        start.clone(),
        |s: &GameState, out| s.for_each_move(|m| out.push(s.apply_unchecked(m))),
        max_vertices,
    )?;
    let labels = graph.labels();
    let winner = Player::from_mover_wins(labels[GameGraph::<GameState>::START as usize].is_win());
    Ok(SolveResult {
        n: start.value(),
        start: start.clone(),
        winner,
        edge_count: graph.edge_count() as u64,
        vertex_count: graph.vertex_count() as u64,
        graph,
        labels,
    })
}

/// Solve the game starting at the Zeckendorf decomposition of `n`.
pub fn solve_n(n: u64) -> Result<SolveResult> {
    Ok(solve(&GameState::zeckendorf(n)?))
}

/// Moves from `state` that leave the opponent in a lost position, in the
/// engine's move order. Empty when `state` is lost or terminal.
pub fn optimal_moves(state: &GameState, result: &SolveResult) -> Result<Vec<Move>> {
    if !result.contains(state) {
        return Err(Error::UnknownState(state.to_string()));
    }
    Ok(state
        .legal_moves()
        .into_iter()
        .filter(|&m| {
            let next = state.apply_unchecked(m);
            result.label(&next) == Some(Label::Loss)
        })
        .collect())
}

/// Fewest moves in any complete game from `start`.
pub fn shortest_game(start: &GameState) -> u64 {
    let r = solve(start);
    u64::from(r.graph.shortest_to_terminal()[0])
}

/// Most moves in any complete game from `start`.
pub fn longest_game(start: &GameState) -> u64 {
    let r = solve(start);
    u64::from(r.graph.longest_to_terminal()[0])
}

/// Shortest and longest complete-game lengths from an already solved start.
pub fn game_length_range(result: &SolveResult) -> (u64, u64) {
    (
        u64::from(result.graph.shortest_to_terminal()[0]),
        u64::from(result.graph.longest_to_terminal()[0]),
    )
}

const PHI: f64 = 1.618_033_988_749_895;

/// `floor(φ² n − Z_I(n) − 2 Z(n) + φ − 1)`, the upper bound on the length of
/// a game started from the Zeckendorf decomposition of `n`.
pub fn length_upper_bound(n: u64) -> Result<i64> {
    let stats = decomposition_stats(n)?;
    let approx =
        PHI * PHI * n as f64 - stats.index_sum as f64 - 2.0 * stats.terms as f64 + PHI - 1.0;
    let nearest = approx.round();
    // Beyond 2^32 an f64 cannot resolve the fractional part at all.
    if n < 1 << 32 && (approx - nearest).abs() > 1e-9 {
        return Ok(approx.floor() as i64);
    }
    // φ² n + φ − 1 = φ (n + 1) + n − 1, so only φ (n + 1) is irrational.
    let exact = floor_phi_times(n + 1) as i128 + n as i128
        - 1
        - stats.index_sum as i128
        - 2 * stats.terms as i128;
    Ok(exact as i64)
}

/// `floor(φ m)` in exact integer arithmetic: with `s = floor(m √5)`,
/// `floor((m + m √5) / 2) = floor((m + s) / 2)` because `m √5` is irrational.
pub(crate) fn floor_phi_times(m: u64) -> u128 {
    let m = u128::from(m);
    let s = (5 * m * m).isqrt();
    (m + s) / 2
}

/// One row of the winner table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub winner: Player,
    pub edges: u64,
    pub vertices: u64,
}

impl TableRow {
    pub fn csv_header() -> &'static str {
        "n,winner,edges,vertices"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{}",
            self.n,
            self.winner.number(),
            self.edges,
            self.vertices
        )
    }
}

fn check_table_range(lo: u64, hi: u64) -> Result<()> {
    if lo < 2 || lo > hi {
        return Err(Error::Domain(format!(
            "table range must satisfy 2 <= lo <= hi, got {lo}..{hi}"
        )));
    }
    if hi > MAX_VALUE {
        return Err(Error::Range {
            what: "n",
            value: hi,
            range: "2..=F_90",
        });
    }
    Ok(())
}

fn row_for(n: u64, max_vertices: Option<usize>) -> Result<TableRow> {
    let r = solve_with_limit(&GameState::zeckendorf(n)?, max_vertices)?;
    Ok(TableRow {
        n,
        winner: r.winner,
        edges: r.edge_count,
        vertices: r.vertex_count,
    })
}

/// Solve every `n` in `lo..=hi` on `threads` workers and hand the rows to
/// `emit` in increasing `n` as soon as each prefix is complete.
///
/// On error, rows for every `n` below the failing one have already been
/// emitted.
pub fn winner_table_streaming<F>(
    lo: u64,
    hi: u64,
    threads: usize,
    max_vertices: Option<usize>,
    mut emit: F,
) -> Result<()>
where
    F: FnMut(TableRow),
{
    check_table_range(lo, hi)?;
    let threads = threads.max(1).min((hi - lo + 1) as usize);
    let next = Arc::new(AtomicU64::new(lo));
    let (tx, rx) = mpsc::channel::<(u64, Result<TableRow>)>();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            let tx = tx.clone();
            let next = Arc::clone(&next);
            scope.spawn(move || loop {
                let n = next.fetch_add(1, Ordering::Relaxed);
                if n > hi {
                    break;
                }
                let row = row_for(n, max_vertices);
                let failed = row.is_err();
                if tx.send((n, row)).is_err() || failed {
                    // Stop handing out work after a failure.
                    next.store(hi + 1, Ordering::Relaxed);
                    break;
                }
            });
        }
        drop(tx);

        let mut pending: BTreeMap<u64, Result<TableRow>> = BTreeMap::new();
        let mut want = lo;
        for (n, row) in rx {
            pending.insert(n, row);
            while let Some(row) = pending.remove(&want) {
                emit(row?);
                want += 1;
            }
        }
        if want <= hi {
            // A worker stopped early; report the first missing n.
            return Err(pending
                .into_values()
                .find_map(|r| r.err())
                .unwrap_or_else(|| Error::ResourceLimit(format!("table stopped at n = {want}"))));
        }
        Ok(())
    })
}

/// Solve every `n` in `lo..=hi` (one solve per `n`).
pub fn winner_table(lo: u64, hi: u64) -> Result<Vec<TableRow>> {
    let threads = std::thread::available_parallelism().map_or(1, |p| p.get());
    let mut rows = Vec::new();
    winner_table_streaming(lo, hi, threads, None, |r| rows.push(r))?;
    Ok(rows)
}

/// Player 1 wins over a range of `n`, with the exact denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinFraction {
    pub p1_wins: u64,
    pub games: u64,
}

impl WinFraction {
    pub fn from_rows(rows: &[TableRow]) -> WinFraction {
        WinFraction {
            p1_wins: rows.iter().filter(|r| r.winner == Player::P1).count() as u64,
            games: rows.len() as u64,
        }
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.p1_wins, self.games)
    }

    pub fn as_f64(&self) -> f64 {
        self.p1_wins as f64 / self.games as f64
    }
}

pub fn win_fraction(lo: u64, hi: u64) -> Result<WinFraction> {
    Ok(WinFraction::from_rows(&winner_table(lo, hi)?))
}
