mod common;

use std::collections::BTreeSet;

use common::reversed_chomp_moves;
use revzeck::chomp::{chomp_solve, chomp_strategy, ChompBoard, ChompPolicy, ReversedChomp};
use revzeck::strategies::verify_policy;
use revzeck::{Game, Player};

#[test]
fn reversed_moves_transpose_forward_chomp() {
    for rows in 1..=5 {
        for cols in 1..=rows {
            let predecessors = reversed_chomp_moves(rows, cols);
            let all = ChompBoard::all_staircases(rows, cols).unwrap();
            assert_eq!(all.len(), predecessors.len(), "{rows}x{cols}");
            for b in all {
                let expected = &predecessors[b.heights()];
                let got: BTreeSet<Vec<u8>> = b.moves().into_iter().map(|m| m.heights).collect();
                assert_eq!(&got, expected, "{b}");
                assert_eq!(b.moves_direct(), b.moves(), "{b}");
            }
        }
    }
}

#[test]
fn solver_structure() {
    for rows in 2..=6 {
        assert_eq!(chomp_solve(rows, 1).unwrap(), Player::P1);
        assert_eq!(chomp_solve(1, rows).unwrap(), Player::P1);
        for cols in 2..=rows.min(4) {
            assert_eq!(
                chomp_solve(rows, cols).unwrap(),
                Player::P2,
                "{rows}x{cols}"
            );
        }
    }
    assert!(chomp_solve(8, 2).is_err());
}

#[test]
fn strategy_certified() {
    for (rows, cols) in [
        (2, 2),
        (3, 2),
        (4, 2),
        (3, 3),
        (4, 3),
        (4, 4),
        (5, 3),
        (6, 5),
    ] {
        let start = ChompBoard::initial(rows, cols).unwrap();
        verify_policy(&ReversedChomp, &start, &mut ChompPolicy, false)
            .unwrap_or_else(|e| panic!("{rows}x{cols}: {e}"));
    }
    for rows in 2..=7 {
        let start = ChompBoard::initial(rows, 1).unwrap();
        verify_policy(&ReversedChomp, &start, &mut ChompPolicy, true).unwrap();
    }
}

/// After each response the unfilled part is a fresh board with fewer rows.
fn check_reduction(b: &ChompBoard, rows_left: usize) {
    for mv in ReversedChomp.legal_moves(b) {
        let after = b.apply(&mv).unwrap();
        if after.is_full() {
            continue;
        }
        let reply = after.apply(&chomp_strategy(&after).unwrap()).unwrap();
        if reply.is_full() {
            continue;
        }
        let (rows, cols) = reply
            .residual_is_fresh()
            .unwrap_or_else(|| panic!("{reply}"));
        assert_eq!(cols, 2, "{reply}");
        assert!(rows < rows_left, "{reply}");
        check_reduction(&reply, rows);
    }
}

#[test]
fn two_column_reduction() {
    for rows in 2..=8 {
        check_reduction(&ChompBoard::initial(rows, 2).unwrap(), rows);
    }
}
