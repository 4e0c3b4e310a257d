//! Constructive winning strategies and an exhaustive verifier for them.
//!
//! * Copycat: from a position whose bins all have even height, the second
//!   player repeats every move of the first and wins.
//! * Opening + mirror: from the decomposition `F_{i+1} + F_{i-2}` the first
//!   player combines into `2 F_i` and then plays copycat.
//! * Ones/twos/threes: positions holding only chips worth 1, 2 and 3 are
//!   decided by the parities of the three counts (and `a` against `c` in two
//!   rows), with an explicit winning move for every won position.

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fib::fib;
use crate::game::{Game, Player};
use crate::state::{GameState, Move, ReversedZeckendorf};

/// Chooses moves for one side of a game.
///
/// [`verify_policy`] assumes the choice depends only on the current state
/// and the opponent's last move; every policy in this crate satisfies that.
pub trait Policy<G: Game> {
    fn choose(
        &mut self,
        game: &G,
        state: &G::State,
        opponent_last: Option<&G::Move>,
    ) -> Result<G::Move>;
}

/// A position made of `ones` chips worth 1, `twos` worth 2, `threes` worth 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ternary {
    pub ones: u32,
    pub twos: u32,
    pub threes: u32,
}

impl Ternary {
    pub fn new(ones: u32, twos: u32, threes: u32) -> Ternary {
        Ternary { ones, twos, threes }
    }

    pub fn value(&self) -> u64 {
        u64::from(self.ones) + 2 * u64::from(self.twos) + 3 * u64::from(self.threes)
    }

    pub fn to_state(&self) -> Result<GameState> {
        GameState::new(vec![self.ones, self.twos, self.threes])
    }

    /// The triple for a state using only bins 1 to 3.
    pub fn from_state(state: &GameState) -> Option<Ternary> {
        (state.len() <= 3).then(|| Ternary::new(state.height(1), state.height(2), state.height(3)))
    }

    pub fn parity_class(&self) -> ParityClass {
        ParityClass::of(self)
    }

    pub fn apply(&self, mv: Move) -> Result<Ternary> {
        let next = self.to_state()?.apply(mv)?;
        Ternary::from_state(&next).ok_or_else(|| Error::Domain(format!("{mv} left bins 1..3")))
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.ones, self.twos, self.threes)
    }
}

/// Parities of `(a, b, c)` plus the `a` vs `c` comparison used by the
/// `OEE` and `EEO` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParityClass {
    pub a_odd: bool,
    pub b_odd: bool,
    pub c_odd: bool,
    /// Present only for the rows that depend on it; never `Equal` there
    /// because `a` and `c` have opposite parities.
    pub a_vs_c: Option<Ordering>,
}

impl ParityClass {
    pub fn of(t: &Ternary) -> ParityClass {
        let (a_odd, b_odd, c_odd) = (t.ones % 2 == 1, t.twos % 2 == 1, t.threes % 2 == 1);
        let needs_cmp = !b_odd && (a_odd != c_odd);
        ParityClass {
            a_odd,
            b_odd,
            c_odd,
            a_vs_c: needs_cmp.then(|| t.ones.cmp(&t.threes)),
        }
    }

    /// Row name such as `"OEE"`.
    pub fn row(&self) -> String {
        [self.a_odd, self.b_odd, self.c_odd]
            .iter()
            .map(|&odd| if odd { 'O' } else { 'E' })
            .collect()
    }
}

/// Winner of the ones/twos/threes game when `P1` is the player about to move
/// on `(a, b, c)`.
pub fn classify123(a: u32, b: u32, c: u32) -> Player {
    let t = Ternary::new(a, b, c);
    let class = t.parity_class();
    let mover_wins = match (class.a_odd, class.b_odd, class.c_odd) {
        (false, false, false) => false,
        (true, true, true) => true,
        (false, true, false) => true,
        (true, false, true) => true,
        (true, false, false) => a < c,
        (false, false, true) => a > c,
        (false, true, true) => true,
        (true, true, false) => true,
    };
    Player::from_mover_wins(mover_wins)
}

/// The winning move for the player about to move on a won triple.
pub fn strategy123(t: &Ternary) -> Result<Move> {
    let (a, c) = (t.ones, t.threes);
    let class = t.parity_class();
    let mv = match (class.a_odd, class.b_odd, class.c_odd) {
        (true, true, true) => Move::Split(3),
        (false, true, false) => Move::Split(2),
        (true, false, true) => Move::Combine(2),
        (true, false, false) if a < c => Move::Combine(2),
        (false, false, true) if a > c => Move::Combine(2),
        (false, true, true) => {
            if a + 2 > c {
                Move::Split(3)
            } else {
                Move::Split(2)
            }
        }
        (true, true, false) => {
            if a + 2 > c {
                Move::Split(2)
            } else {
                Move::Split(3)
            }
        }
        _ => return Err(Error::NoWinningMove(t.to_string())),
    };
    Ok(mv)
}

/// Repeat the opponent's move. `state` is the position after that move,
/// which must have been played on a position with all heights even.
pub fn copycat_respond(state: &GameState, opponent_move: Move) -> Result<Move> {
    if !state.is_legal(opponent_move) {
        return Err(Error::Strategy(format!(
            "{opponent_move} cannot be repeated in {state}"
        )));
    }
    // Playing a move twice changes each touched bin by an even amount, so the
    // result is all-even exactly when the position before the opponent's move was.
    let next = state.apply_unchecked(opponent_move);
    if !next.all_even() {
        return Err(Error::Strategy(format!(
            "position before {opponent_move} did not have all heights even"
        )));
    }
    Ok(opponent_move)
}

/// Second-player copycat policy for all-even starts.
#[derive(Debug, Clone, Copy, Default)]
pub struct CopycatPolicy;

impl Policy<ReversedZeckendorf> for CopycatPolicy {
    fn choose(
        &mut self,
        _: &ReversedZeckendorf,
        state: &GameState,
        last: Option<&Move>,
    ) -> Result<Move> {
        match last {
            Some(&m) => copycat_respond(state, m),
            None => Err(Error::Strategy("copycat cannot make the first move".into())),
        }
    }
}

/// First-player policy for the start `F_{i+1} + F_{i-2}`: combine into
/// `2 F_i`, then copy every reply.
#[derive(Debug, Clone)]
pub struct Thm12Policy {
    i: usize,
    start: GameState,
}

impl Thm12Policy {
    pub fn index(&self) -> usize {
        self.i
    }

    pub fn start(&self) -> &GameState {
        &self.start
    }

    /// `F_{i+1} + F_{i-2}`.
    pub fn n(&self) -> u64 {
        self.start.value()
    }
}

pub fn thm12_policy(i: usize) -> Result<Thm12Policy> {
    if i < 3 {
        return Err(Error::Strategy(format!(
            "opening index must be at least 3, got {i}"
        )));
    }
    fib(i + 1)?;
    let mut heights = vec![0u32; i + 1];
    heights[i] = 1;
    heights[i - 3] = 1;
    Ok(Thm12Policy {
        i,
        start: GameState::new(heights)?,
    })
}

/// Find `i` with `n = F_{i+1} + F_{i-2}`, if any.
pub fn thm12_index(n: u64) -> Option<usize> {
    (3..crate::fib::MAX_INDEX).find(
        |&i| matches!((fib(i + 1), fib(i - 2)), (Ok(hi), Ok(lo)) if hi.checked_add(lo) == Some(n)),
    )
}

impl Policy<ReversedZeckendorf> for Thm12Policy {
    fn choose(
        &mut self,
        _: &ReversedZeckendorf,
        state: &GameState,
        last: Option<&Move>,
    ) -> Result<Move> {
        match last {
            None if *state == self.start => Ok(Move::Combine(self.i)),
            None => Err(Error::Strategy(format!(
                "opening applies to {} only, got {state}",
                self.start
            ))),
            Some(&m) => copycat_respond(state, m),
        }
    }
}

/// Plays [`strategy123`] on ones/twos/threes positions.
#[derive(Debug, Clone, Copy, Default)]
pub struct Strategy123Policy;

impl Policy<ReversedZeckendorf> for Strategy123Policy {
    fn choose(
        &mut self,
        _: &ReversedZeckendorf,
        state: &GameState,
        _: Option<&Move>,
    ) -> Result<Move> {
        let t = Ternary::from_state(state)
            .ok_or_else(|| Error::Strategy(format!("{state} uses bins above 3")))?;
        strategy123(&t)
    }
}

/// Proof that a policy wins against every adversary line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    /// Distinct adversary-to-move positions examined.
    pub adversary_positions: usize,
}

/// A line of play on which the policy failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationFailure {
    pub line: Vec<String>,
    pub reason: String,
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} after [{}]", self.reason, self.line.join(", "))
    }
}

impl std::error::Error for VerificationFailure {}

/// Play `policy` against every possible adversary and check that the
/// policy's side always makes the last move.
pub fn verify_policy<G, P>(
    game: &G,
    start: &G::State,
    policy: &mut P,
    policy_moves_first: bool,
) -> std::result::Result<Certificate, VerificationFailure>
where
    G: Game,
    P: Policy<G>,
{
    let mut v = Verifier {
        game,
        policy,
        safe: FxHashSet::default(),
        line: Vec::new(),
    };
    if policy_moves_first {
        v.policy_turn(start, None)?;
    } else {
        v.adversary_turn(start)?;
    }
    Ok(Certificate {
        adversary_positions: v.safe.len(),
    })
}

struct Verifier<'a, G: Game, P> {
    game: &'a G,
    policy: &'a mut P,
    safe: FxHashSet<G::State>,
    line: Vec<String>,
}

impl<G: Game, P: Policy<G>> Verifier<'_, G, P> {
    fn fail(&self, reason: String) -> VerificationFailure {
        VerificationFailure {
            line: self.line.clone(),
            reason,
        }
    }

    fn policy_turn(
        &mut self,
        state: &G::State,
        last: Option<&G::Move>,
    ) -> std::result::Result<(), VerificationFailure> {
        let moves = self.game.legal_moves(state);
        if moves.is_empty() {
            return Err(self.fail(format!("policy side has no move at {state}")));
        }
        let mv = self
            .policy
            .choose(self.game, state, last)
            .map_err(|e| self.fail(format!("policy failed at {state}: {e}")))?;
        if !moves.contains(&mv) {
            return Err(self.fail(format!("policy chose illegal move {mv} at {state}")));
        }
        let next = self
            .game
            .play(state, &mv)
            .map_err(|e| self.fail(e.to_string()))?;
        self.line.push(mv.to_string());
        self.adversary_turn(&next)?;
        self.line.pop();
        Ok(())
    }

    fn adversary_turn(&mut self, state: &G::State) -> std::result::Result<(), VerificationFailure> {
        if self.safe.contains(state) {
            return Ok(());
        }
        for mv in self.game.legal_moves(state) {
            let next = self
                .game
                .play(state, &mv)
                .map_err(|e| self.fail(e.to_string()))?;
            self.line.push(mv.to_string());
            self.policy_turn(&next, Some(&mv))?;
            self.line.pop();
        }
        self.safe.insert(state.clone());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(h: &[u32]) -> GameState {
        GameState::new(h.to_vec()).unwrap()
    }

    #[test]
    fn copycat_examples() {
        let after = st(&[0, 0, 2]).apply(Move::Split(3)).unwrap();
        assert_eq!(after, st(&[1, 1, 1]));
        assert_eq!(
            copycat_respond(&after, Move::Split(3)).unwrap(),
            Move::Split(3)
        );
        assert_eq!(after.apply(Move::Split(3)).unwrap(), st(&[2, 2]));

        let after = st(&[0, 2]).apply(Move::Split(2)).unwrap();
        assert_eq!(after, st(&[2, 1]));
        assert_eq!(
            after
                .apply(copycat_respond(&after, Move::Split(2)).unwrap())
                .unwrap(),
            st(&[4])
        );

        let after = st(&[2, 0, 2]).apply(Move::Combine(2)).unwrap();
        assert_eq!(after, st(&[1, 2, 1]));
        assert_eq!(
            after
                .apply(copycat_respond(&after, Move::Combine(2)).unwrap())
                .unwrap(),
            st(&[0, 4])
        );
    }

    #[test]
    fn copycat_rejects_odd_predecessor() {
        // (1,0,1) is not all-even; after Split(3) we reach (2,1).
        let after = st(&[1, 0, 1]).apply(Move::Split(3)).unwrap();
        assert!(matches!(
            copycat_respond(&after, Move::Split(3)),
            Err(Error::Strategy(_))
        ));
    }

    #[test]
    fn combine_openings() {
        let mut p = thm12_policy(3).unwrap();
        assert_eq!(p.start(), &st(&[1, 0, 0, 1]));
        let g = ReversedZeckendorf;
        let m = p.choose(&g, &st(&[1, 0, 0, 1]), None).unwrap();
        assert_eq!(m, Move::Combine(3));
        assert_eq!(st(&[1, 0, 0, 1]).apply(m).unwrap(), st(&[0, 0, 2]));

        let mut p = thm12_policy(4).unwrap();
        assert_eq!(p.n(), 10);
        let m = p.choose(&g, &st(&[0, 1, 0, 0, 1]), None).unwrap();
        assert_eq!(st(&[0, 1, 0, 0, 1]).apply(m).unwrap(), st(&[0, 0, 0, 2]));

        assert!(p.choose(&g, &st(&[0, 1, 0, 1]), None).is_err());
        assert!(thm12_policy(2).is_err());
        assert_eq!(thm12_index(16), Some(5));
        assert_eq!(thm12_index(7), None);
    }

    #[test]
    fn classifier_rows() {
        assert_eq!(classify123(2, 2, 2), Player::P2);
        assert_eq!(classify123(1, 1, 1), Player::P1);
        assert_eq!(classify123(3, 0, 2), Player::P2);
        assert_eq!(classify123(1, 0, 2), Player::P1);
        assert_eq!(classify123(2, 0, 1), Player::P1);
        assert_eq!(classify123(0, 0, 1), Player::P2);
        // Terminal piles of ones lose for the mover whatever the parity.
        assert_eq!(classify123(4, 0, 0), Player::P2);
        assert_eq!(classify123(5, 0, 0), Player::P2);
    }

    #[test]
    fn parity_rows_with_comparison_never_tie() {
        for a in 0..20 {
            for c in 0..20 {
                let class = Ternary::new(a, 0, c).parity_class();
                if let Some(ord) = class.a_vs_c {
                    assert_ne!(ord, Ordering::Equal);
                    assert!(["OEE", "EEO"].contains(&class.row().as_str()));
                }
            }
        }
    }

    #[test]
    fn strategy_examples() {
        let t = Ternary::new(1, 1, 1);
        assert_eq!(strategy123(&t).unwrap(), Move::Split(3));
        assert_eq!(t.apply(Move::Split(3)).unwrap(), Ternary::new(2, 2, 0));
        let t = Ternary::new(0, 1, 0);
        assert_eq!(strategy123(&t).unwrap(), Move::Split(2));
        assert_eq!(t.apply(Move::Split(2)).unwrap(), Ternary::new(2, 0, 0));
        assert!(matches!(
            strategy123(&Ternary::new(0, 0, 1)),
            Err(Error::NoWinningMove(_))
        ));
    }

    #[test]
    fn ternary_moves_stay_ternary() {
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let Ok(s) = Ternary::new(a, b, c).to_state() else {
                        continue;
                    };
                    for m in s.legal_moves() {
                        assert!(
                            matches!(m, Move::Split(2) | Move::Split(3) | Move::Combine(2)),
                            "{m} from {s:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn verifier_certifies_small_cases() {
        let g = ReversedZeckendorf;
        let mut p = thm12_policy(3).unwrap();
        let start = p.start().clone();
        assert!(verify_policy(&g, &start, &mut p, true).is_ok());
        assert!(verify_policy(&g, &st(&[0, 0, 2]), &mut CopycatPolicy, false).is_ok());
        assert!(verify_policy(&g, &st(&[1, 1, 1]), &mut Strategy123Policy, true).is_ok());
    }

    #[test]
    fn verifier_reports_losing_line() {
        // Copycat cannot win as the second player from a position it does not cover.
        let g = ReversedZeckendorf;
        let err = verify_policy(&g, &st(&[1, 0, 1]), &mut CopycatPolicy, false).unwrap_err();
        assert!(!err.line.is_empty());
        assert!(err.reason.contains("policy"));
    }
}
