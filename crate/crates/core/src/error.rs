use thiserror::Error;

/// Errors raised by the game engine, solvers and strategy oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the domain of an operation (n = 0, empty state, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric argument outside the supported range.
    #[error("{what} = {value} is out of range ({range})")]
    Range {
        what: &'static str,
        value: u64,
        range: &'static str,
    },

    /// A move whose precondition does not hold in the given state.
    #[error("illegal move {mv} in state {state}: {reason}")]
    IllegalMove {
        mv: String,
        state: String,
        reason: String,
    },

    /// A state that is not part of a solved game graph.
    #[error("state {0} is not in the solved game graph")]
    UnknownState(String),

    /// A strategy was invoked outside the positions it covers.
    #[error("strategy domain error: {0}")]
    Strategy(String),

    /// The mover has no winning move in a lost position.
    #[error("no winning move from {0}: the player to move loses under optimal play")]
    NoWinningMove(String),

    /// Exact counting overflowed its integer type.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// Graph construction stopped at a configured size limit.
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),

    /// Text input that could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A cycle was found in a graph assumed to be acyclic.
    #[error("cycle detected at state {0}")]
    Cycle(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
