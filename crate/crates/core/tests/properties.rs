mod common;

use std::collections::{BTreeSet, HashSet};

use common::{fibonacci_partitions, forward_moves, transposed_forward_graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revzeck::fib::{self, zeckendorf};
use revzeck::randomplay::playout;
use revzeck::strategies::{copycat_respond, Ternary};
use revzeck::{GameState, Move};

fn any_state() -> impl Strategy<Value = GameState> {
    prop::collection::vec(0u32..5, 1..8)
        .prop_filter("empty board", |h| h.iter().any(|&x| x > 0))
        .prop_map(|h| GameState::new(h).unwrap())
}

fn candidate_moves() -> Vec<Move> {
    (2..=10)
        .flat_map(|j| [Move::Split(j), Move::Combine(j)])
        .collect()
}

proptest! {
    #[test]
    fn moves_conserve_value_and_raise_potential(s in any_state()) {
        for mv in s.legal_moves() {
            let t = s.apply(mv).unwrap();
            prop_assert_eq!(t.value(), s.value());
            prop_assert!(t.potential() > s.potential(), "{} -> {} via {}", s, t, mv);
            prop_assert!(t.len() <= s.len());
        }
    }

    #[test]
    fn legal_moves_are_exactly_the_applicable_ones(s in any_state()) {
        let legal: HashSet<Move> = s.legal_moves().into_iter().collect();
        for mv in candidate_moves() {
            prop_assert_eq!(legal.contains(&mv), s.apply(mv).is_ok(), "{} at {}", mv, s);
            prop_assert_eq!(legal.contains(&mv), s.is_legal(mv));
        }
    }

    #[test]
    fn random_games_account_for_chips(n in 1u64..400, seed in any::<u64>()) {
        let start = GameState::zeckendorf(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (splits, _) = playout(&start, &mut rng);
        prop_assert_eq!(splits, n - start.chips());
    }

    #[test]
    fn walk_keeps_invariants(n in 1u64..200, choices in prop::collection::vec(any::<usize>(), 0..400)) {
        let mut s = GameState::zeckendorf(n).unwrap();
        let z = s.chips();
        let mut splits = 0u64;
        for c in choices {
            let moves = s.legal_moves();
            if moves.is_empty() {
                break;
            }
            let mv = moves[c % moves.len()];
            if let Move::Split(_) = mv {
                splits += 1;
            }
            let t = s.apply(mv).unwrap();
            prop_assert!(t.len() <= s.len());
            s = t;
        }
        prop_assert_eq!(s.chips(), z + splits);
        if s.is_terminal() {
            prop_assert_eq!(s.heights(), &[n as u32][..]);
            prop_assert_eq!(splits, n - z);
        }
    }

    #[test]
    fn state_text_roundtrip(s in any_state()) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<GameState>().unwrap(), s.clone());
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<GameState>(&json).unwrap(), s);
    }

    #[test]
    fn move_text_roundtrip(j in 2usize..50, split in any::<bool>()) {
        let mv = if split { Move::Split(j) } else { Move::Combine(j) };
        prop_assert_eq!(mv.to_string().parse::<Move>().unwrap(), mv);
        let json = serde_json::to_string(&mv).unwrap();
        prop_assert_eq!(serde_json::from_str::<Move>(&json).unwrap(), mv);
    }

    #[test]
    fn ternary_moves_stay_low(a in 0u32..8, b in 0u32..8, c in 0u32..8) {
        prop_assume!(a + b + c > 0);
        let s = Ternary::new(a, b, c).to_state().unwrap();
        for mv in s.legal_moves() {
            match mv {
                Move::Split(j) => prop_assert!(j <= 3),
                Move::Combine(i) => prop_assert!(i <= 2),
            }
        }
    }

    #[test]
    fn copycat_closure(half in prop::collection::vec(0u32..3, 1..6)) {
        let h: Vec<u32> = half.iter().map(|x| 2 * x).collect();
        prop_assume!(h.iter().any(|&x| x > 0));
        let s = GameState::new(h).unwrap();
        for mv in s.legal_moves() {
            let t = s.apply(mv).unwrap();
            prop_assert!(t.is_legal(mv));
            prop_assert_eq!(copycat_respond(&t, mv).unwrap(), mv);
            prop_assert!(t.apply(mv).unwrap().all_even());
        }
    }

    #[test]
    fn zeckendorf_large(n in 1u64..=fib::MAX_VALUE) {
        let z = zeckendorf(n).unwrap();
        prop_assert_eq!(fib::value_of(&z), n);
        prop_assert!(z.windows(2).all(|w| w[0] + w[1] <= 1));
        let (f, k) = fib::largest_fib_leq(n).unwrap();
        prop_assert!(f <= n);
        if k < fib::MAX_INDEX {
            prop_assert!(n < fib::fib(k + 1).unwrap());
        }
    }
}

#[test]
fn reversed_moves_transpose_forward_moves() {
    for n in 1..=15 {
        for (a, expected) in transposed_forward_graph(n) {
            let sa = GameState::new(a.clone()).unwrap();
            let reversed: BTreeSet<Vec<u32>> = sa
                .successors()
                .iter()
                .map(|s| s.heights().to_vec())
                .collect();
            assert_eq!(reversed, expected, "n = {n}, state {sa}");
            let forward: BTreeSet<Vec<u32>> = sa
                .forward_successors()
                .iter()
                .map(|s| s.heights().to_vec())
                .collect();
            assert_eq!(forward, forward_moves(&a), "forward moves at {sa}");
        }
    }
}

#[test]
fn partitions_are_counted_right() {
    // Partitions of n into parts 1, 2, 3, 5, 8, ...
    let counts: Vec<usize> = (1..=10).map(|n| fibonacci_partitions(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 3, 4, 6, 8, 10, 14, 17, 22]);
}
