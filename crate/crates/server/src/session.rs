//! Game sessions: one game of any supported mode plus the engine that plays
//! one side of it.

use std::sync::Arc;

use rand::Rng;
use revzeck::buildup::{BuildUpGame, BuildUpMove, BuildUpPolicy, BuildUpState};
use revzeck::chomp::{ChompBoard, ChompMove, ChompPolicy, ReversedChomp, MAX_SOLVE_SIDE};
use revzeck::graph::GameGraph;
use revzeck::randomplay::trial_rng;
use revzeck::strategies::{
    thm12_index, thm12_policy, CopycatPolicy, Policy, Strategy123Policy, Ternary,
};
use revzeck::{Game, GameState, Label, Move, Player, ReversedZeckendorf};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;

/// Largest `n` (or board value) accepted for any mode.
pub const MAX_N: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EnginePolicy {
    #[default]
    Optimal,
    Strategy,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ModeSpec {
    ReversedZeck { n: u64 },
    CustomStart { heights: String },
    Buildup { n: u32 },
    Chomp { rows: usize, cols: usize },
}

/// Body of `POST /games`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateRequest {
    #[serde(flatten)]
    pub mode: ModeSpec,
    #[serde(default = "default_engine_side")]
    pub engine_side: Player,
    #[serde(default)]
    pub engine_policy: EnginePolicy,
    /// Seed for the random engine; each ply draws from its own stream.
    #[serde(default)]
    pub seed: u64,
}

fn default_engine_side() -> Player {
    Player::P2
}

/// A move in any mode, as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MoveBody {
    Split { index: usize },
    Combine { index: usize },
    Place { value: u32 },
    Chomp { heights: Vec<u8> },
}

impl From<Move> for MoveBody {
    fn from(m: Move) -> MoveBody {
        match m {
            Move::Split(index) => MoveBody::Split { index },
            Move::Combine(index) => MoveBody::Combine { index },
        }
    }
}

impl MoveBody {
    fn zeck(&self) -> Option<Move> {
        match *self {
            MoveBody::Split { index } => Some(Move::Split(index)),
            MoveBody::Combine { index } => Some(Move::Combine(index)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    P1Won,
    P2Won,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: MoveBody,
}

/// Glue between a core [`Game`] and the wire format.
trait Mode: Game + Copy + Send + Sync + 'static
where
    Self::State: Send + Sync,
    Self::Move: Send,
{
    fn encode(mv: &Self::Move) -> MoveBody;
    fn decode(body: &MoveBody) -> Option<Self::Move>;
    fn state_json(state: &Self::State) -> Value;
    fn to_move(state: &Self::State, plies: usize) -> Player {
        let _ = state;
        if plies.is_multiple_of(2) {
            Player::P1
        } else {
            Player::P2
        }
    }
}

impl Mode for ReversedZeckendorf {
    fn encode(mv: &Move) -> MoveBody {
        MoveBody::from(*mv)
    }

    fn decode(body: &MoveBody) -> Option<Move> {
        body.zeck()
    }

    fn state_json(state: &GameState) -> Value {
        Value::String(state.to_string())
    }
}

impl Mode for BuildUpGame {
    fn encode(mv: &BuildUpMove) -> MoveBody {
        match *mv {
            BuildUpMove::Place(value) => MoveBody::Place { value },
            BuildUpMove::Play(m) => MoveBody::from(m),
        }
    }

    fn decode(body: &MoveBody) -> Option<BuildUpMove> {
        match body {
            MoveBody::Place { value } => Some(BuildUpMove::Place(*value)),
            other => other.zeck().map(BuildUpMove::Play),
        }
    }

    fn state_json(state: &BuildUpState) -> Value {
        let mut v = serde_json::to_value(state).expect("plain data");
        let t = state.triple;
        v["heights"] = Value::String(format!("{},{},{}", t.ones, t.twos, t.threes));
        v
    }

    fn to_move(state: &BuildUpState, _: usize) -> Player {
        state.to_move
    }
}

impl Mode for ReversedChomp {
    fn encode(mv: &ChompMove) -> MoveBody {
        MoveBody::Chomp {
            heights: mv.heights.clone(),
        }
    }

    fn decode(body: &MoveBody) -> Option<ChompMove> {
        match body {
            MoveBody::Chomp { heights } => Some(ChompMove {
                heights: heights.clone(),
            }),
            _ => None,
        }
    }

    fn state_json(state: &ChompBoard) -> Value {
        serde_json::to_value(state).expect("plain data")
    }
}

/// The reachable graph of a game with every position labeled.
struct Solved<G: Game> {
    graph: GameGraph<G::State>,
    labels: Vec<Label>,
}

impl<G: Game> Solved<G> {
    fn new(game: &G, start: G::State) -> Result<Solved<G>, ApiError> {
        let graph = GameGraph::from_game(game, start, None).map_err(ApiError::internal)?;
        let labels = graph.labels();
        Ok(Solved { graph, labels })
    }

    fn label(&self, state: &G::State) -> Option<Label> {
        self.graph.id_of(state).map(|id| self.labels[id as usize])
    }
}

/// Read-only view returned by `GET /games/{id}/analysis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub to_move: Player,
    pub label: Label,
    pub winner_under_optimal: Player,
    pub optimal_moves: Vec<MoveBody>,
}

/// Object-safe view of a game in progress.
trait Board: Send {
    fn state_json(&self) -> Value;
    fn to_move(&self) -> Player;
    fn legal(&self) -> Vec<MoveBody>;
    fn apply(&mut self, mv: &MoveBody) -> Result<(), ApiError>;
    fn engine_move(&mut self, policy: EnginePolicy, seed: u64) -> Result<MoveBody, ApiError>;
    fn analysis(&mut self) -> Result<Analysis, ApiError>;
}

struct Table<G: Mode>
where
    G::State: Send + Sync,
    G::Move: Send,
{
    game: G,
    start: G::State,
    state: G::State,
    plies: usize,
    last: Option<G::Move>,
    solvable: bool,
    solved: Option<Arc<Solved<G>>>,
    strategy: Option<Box<dyn Policy<G> + Send>>,
}

impl<G: Mode> Table<G>
where
    G::State: Send + Sync,
    G::Move: Send,
{
    fn new(
        game: G,
        start: G::State,
        solvable: bool,
        strategy: Option<Box<dyn Policy<G> + Send>>,
    ) -> Table<G> {
        Table {
            game,
            state: start.clone(),
            start,
            plies: 0,
            last: None,
            solvable,
            solved: None,
            strategy,
        }
    }

    fn solved(&mut self) -> Result<Arc<Solved<G>>, ApiError> {
        if !self.solvable {
            return Err(ApiError::over_limit());
        }
        if self.solved.is_none() {
            self.solved = Some(Arc::new(Solved::new(&self.game, self.start.clone())?));
        }
        Ok(Arc::clone(self.solved.as_ref().expect("just filled")))
    }

    fn optimal_moves(&mut self) -> Result<Vec<G::Move>, ApiError> {
        let solved = self.solved()?;
        let mut out = Vec::new();
        for mv in self.game.legal_moves(&self.state) {
            let next = self
                .game
                .play(&self.state, &mv)
                .map_err(ApiError::internal)?;
            if solved.label(&next) == Some(Label::Loss) {
                out.push(mv);
            }
        }
        Ok(out)
    }

    fn pick(&mut self, policy: EnginePolicy, seed: u64) -> Result<G::Move, ApiError> {
        let moves = self.game.legal_moves(&self.state);
        let first = moves
            .first()
            .cloned()
            .ok_or_else(ApiError::game_over)?;
        Ok(match policy {
            EnginePolicy::Optimal => self.optimal_moves()?.into_iter().next().unwrap_or(first),
            EnginePolicy::Random => {
                let mut rng = trial_rng(seed, self.plies as u64);
                moves[rng.gen_range(0..moves.len())].clone()
            }
            EnginePolicy::Strategy => {
                let chosen = self
                    .strategy
                    .as_mut()
                    .and_then(|p| p.choose(&self.game, &self.state, self.last.as_ref()).ok());
                match chosen {
                    Some(mv) if moves.contains(&mv) => mv,
                    _ => first,
                }
            }
        })
    }
}

impl<G: Mode> Board for Table<G>
where
    G::State: Send + Sync,
    G::Move: Send,
{
    fn state_json(&self) -> Value {
        G::state_json(&self.state)
    }

    fn to_move(&self) -> Player {
        G::to_move(&self.state, self.plies)
    }

    fn legal(&self) -> Vec<MoveBody> {
        self.game
            .legal_moves(&self.state)
            .iter()
            .map(G::encode)
            .collect()
    }

    fn apply(&mut self, body: &MoveBody) -> Result<(), ApiError> {
        let illegal =
            || ApiError::illegal_move(format!("{body:?} is not legal here"), self.legal());
        let mv = G::decode(body).ok_or_else(illegal)?;
        if !self.game.legal_moves(&self.state).contains(&mv) {
            return Err(illegal());
        }
        self.state = self
            .game
            .play(&self.state, &mv)
            .map_err(ApiError::internal)?;
        self.plies += 1;
        self.last = Some(mv);
        Ok(())
    }

    fn engine_move(&mut self, policy: EnginePolicy, seed: u64) -> Result<MoveBody, ApiError> {
        let mv = self.pick(policy, seed)?;
        let body = G::encode(&mv);
        self.apply(&body)?;
        Ok(body)
    }

    fn analysis(&mut self) -> Result<Analysis, ApiError> {
        let solved = self.solved()?;
        let label = solved
            .label(&self.state)
            .ok_or_else(|| ApiError::internal("position missing from the solved graph"))?;
        let to_move = self.to_move();
        Ok(Analysis {
            to_move,
            label,
            winner_under_optimal: if label.is_win() {
                to_move
            } else {
                to_move.other()
            },
            optimal_moves: self.optimal_moves()?.iter().map(G::encode).collect(),
        })
    }
}

/// Limits applied when creating sessions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` (or start value) for which the optimal engine and the
    /// analysis endpoint are available.
    pub solve_limit: u64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { solve_limit: 80 }
    }
}

fn zeck_strategy(
    start: &GameState,
    engine: Player,
) -> Option<Box<dyn Policy<ReversedZeckendorf> + Send>> {
    let n = start.value();
    if engine == Player::P1 {
        if let Some(i) = thm12_index(n) {
            let p = thm12_policy(i).ok()?;
            if p.start() == start {
                return Some(Box::new(p));
            }
        }
    }
    if engine == Player::P2 && start.all_even() {
        return Some(Box::new(CopycatPolicy));
    }
    Ternary::from_state(start)
        .map(|_| Box::new(Strategy123Policy) as Box<dyn Policy<ReversedZeckendorf> + Send>)
}

fn build_board(req: &CreateRequest, limits: Limits) -> Result<Box<dyn Board>, ApiError> {
    let optimal = req.engine_policy == EnginePolicy::Optimal;
    let check_n = |n: u64| {
        if n == 0 || n > MAX_N {
            return Err(ApiError::invalid(format!("n must be in 1..={MAX_N}")));
        }
        if optimal && n > limits.solve_limit {
            return Err(ApiError::over_limit());
        }
        Ok(n <= limits.solve_limit)
    };
    Ok(match &req.mode {
        ModeSpec::ReversedZeck { n } => {
            let solvable = check_n(*n)?;
            let start = GameState::zeckendorf(*n).map_err(ApiError::invalid)?;
            let strategy = zeck_strategy(&start, req.engine_side);
            Box::new(Table::new(ReversedZeckendorf, start, solvable, strategy))
        }
        ModeSpec::CustomStart { heights } => {
            let start: GameState = heights.parse().map_err(ApiError::invalid)?;
            let solvable = check_n(start.value())?;
            let strategy = zeck_strategy(&start, req.engine_side);
            Box::new(Table::new(ReversedZeckendorf, start, solvable, strategy))
        }
        ModeSpec::Buildup { n } => {
            let solvable = check_n(u64::from(*n))?;
            let start = BuildUpState::new(*n).map_err(ApiError::invalid)?;
            let strategy = BuildUpPolicy::for_side(*n, req.engine_side)
                .ok()
                .map(|p| Box::new(p) as Box<dyn Policy<BuildUpGame> + Send>);
            Box::new(Table::new(BuildUpGame, start, solvable, strategy))
        }
        ModeSpec::Chomp { rows, cols } => {
            let start = ChompBoard::initial(*rows, *cols).map_err(ApiError::invalid)?;
            if start.is_full() {
                return Err(ApiError::invalid("the 1x1 board is already full"));
            }
            let solvable = start.rows <= MAX_SOLVE_SIDE;
            if optimal && !solvable {
                return Err(ApiError::over_limit());
            }
            Box::new(Table::new(
                ReversedChomp,
                start,
                solvable,
                Some(Box::new(ChompPolicy)),
            ))
        }
    })
}

/// One game against the engine.
pub struct Session {
    pub id: String,
    pub request: CreateRequest,
    pub history: Vec<HistoryEntry>,
    board: Box<dyn Board>,
}

/// JSON view of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    #[serde(flatten)]
    pub mode: ModeSpec,
    pub state: Value,
    pub to_move: Player,
    pub engine_side: Player,
    pub engine_policy: EnginePolicy,
    pub history: Vec<HistoryEntry>,
    pub status: Status,
    pub legal_moves: Vec<MoveBody>,
}

impl Session {
    /// A fresh session; the engine moves at once if it has the first move.
    pub fn create(id: String, request: CreateRequest, limits: Limits) -> Result<Session, ApiError> {
        let board = build_board(&request, limits)?;
        let mut s = Session {
            id,
            request,
            history: Vec::new(),
            board,
        };
        s.engine_turns()?;
        Ok(s)
    }

    /// Rebuild a session by replaying its recorded moves; the engine is not
    /// consulted.
    pub fn replay(
        id: String,
        request: CreateRequest,
        moves: &[MoveBody],
        limits: Limits,
    ) -> Result<Session, ApiError> {
        let board = build_board(&request, limits)?;
        let mut s = Session {
            id,
            request,
            history: Vec::new(),
            board,
        };
        for mv in moves {
            s.record(mv.clone())?;
        }
        Ok(s)
    }

    fn record(&mut self, mv: MoveBody) -> Result<(), ApiError> {
        let player = self.board.to_move();
        self.board.apply(&mv)?;
        self.history.push(HistoryEntry { player, mv });
        Ok(())
    }

    pub fn status(&self) -> Status {
        if !self.board.legal().is_empty() {
            return Status::InProgress;
        }
        match self.board.to_move() {
            Player::P1 => Status::P2Won,
            Player::P2 => Status::P1Won,
        }
    }

    pub fn to_move(&self) -> Player {
        self.board.to_move()
    }

    fn engine_turns(&mut self) -> Result<(), ApiError> {
        while self.status() == Status::InProgress
            && self.board.to_move() == self.request.engine_side
        {
            let mv = self
                .board
                .engine_move(self.request.engine_policy, self.request.seed)?;
            let player = self.request.engine_side;
            self.history.push(HistoryEntry { player, mv });
        }
        Ok(())
    }

    /// Apply the human's move, then let the engine answer.
    pub fn human_move(&mut self, mv: MoveBody) -> Result<(), ApiError> {
        if self.status() != Status::InProgress {
            return Err(ApiError::game_over());
        }
        if self.board.to_move() == self.request.engine_side {
            return Err(ApiError::wrong_turn());
        }
        self.record(mv)?;
        self.engine_turns()
    }

    pub fn analysis(&mut self) -> Result<Analysis, ApiError> {
        self.board.analysis()
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            mode: self.request.mode.clone(),
            state: self.board.state_json(),
            to_move: self.board.to_move(),
            engine_side: self.request.engine_side,
            engine_policy: self.request.engine_policy,
            history: self.history.clone(),
            status: self.status(),
            legal_moves: self.board.legal(),
        }
    }
}
