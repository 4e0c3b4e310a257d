//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use revzeck::fib;
use revzeck::solver::TableRow;
use revzeck::Player;

/// Rows of the published winner table, `n = 2..=129`.
pub fn reference_rows() -> Vec<TableRow> {
    include_str!("../data/winner_table.csv")
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            TableRow {
                n: f[0],
                winner: Player::from_number(f[1] as u8).unwrap(),
                edges: f[2],
                vertices: f[3],
            }
        })
        .collect()
}

/// Every multiset of Fibonacci numbers summing to `n`, as height vectors
/// without trailing zeros.
pub fn fibonacci_partitions(n: u64) -> Vec<Vec<u32>> {
    let fibs: Vec<u64> = (1..=fib::MAX_INDEX)
        .map(|k| fib::fib(k).unwrap())
        .take_while(|&f| f <= n)
        .collect();
    fn rec(fibs: &[u64], k: usize, rest: u64, h: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            if rest.is_multiple_of(fibs[0]) {
                h[0] = rest as u32;
                out.push(trim(h.clone()));
            }
            return;
        }
        for c in 0..=rest / fibs[k] {
            h[k] = c as u32;
            rec(fibs, k - 1, rest - c * fibs[k], h, out);
        }
        h[k] = 0;
    }
    let mut out = Vec::new();
    let mut h = vec![0; fibs.len()];
    rec(&fibs, fibs.len() - 1, n, &mut h, &mut out);
    out
}

pub fn trim(mut h: Vec<u32>) -> Vec<u32> {
    while h.last() == Some(&0) {
        h.pop();
    }
    h
}

/// Forward Zeckendorf moves written out from the rules, on raw vectors.
pub fn forward_moves(h: &[u32]) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut push = |deltas: &[(usize, i64)]| {
        let mut g: Vec<i64> = h.iter().map(|&x| i64::from(x)).collect();
        g.resize(h.len() + 2, 0);
        for &(i, d) in deltas {
            g[i - 1] += d;
        }
        if g.iter().all(|&x| x >= 0) {
            out.insert(trim(g.into_iter().map(|x| x as u32).collect()));
        }
    };
    // 1 + 1 = 2
    push(&[(1, -2), (2, 1)]);
    // 2 + 2 = 3 + 1
    push(&[(2, -2), (3, 1), (1, 1)]);
    for i in 2..=h.len() {
        // F_{i-1} + F_i = F_{i+1}
        push(&[(i - 1, -1), (i, -1), (i + 1, 1)]);
    }
    for i in 3..=h.len() {
        // 2 F_i = F_{i+1} + F_{i-2}
        push(&[(i, -2), (i + 1, 1), (i - 2, 1)]);
    }
    out
}

/// For each partition of `n`, the partitions one forward move away from it
/// in reverse: the expected reversed successors.
pub fn transposed_forward_graph(n: u64) -> BTreeMap<Vec<u32>, BTreeSet<Vec<u32>>> {
    let all = fibonacci_partitions(n);
    let mut preds: BTreeMap<Vec<u32>, BTreeSet<Vec<u32>>> =
        all.iter().map(|a| (a.clone(), BTreeSet::new())).collect();
    for b in &all {
        for a in forward_moves(b) {
            preds
                .get_mut(&a)
                .expect("forward move leaves the partitions")
                .insert(b.clone());
        }
    }
    preds
}

pub type Squares = BTreeSet<(usize, usize)>;

/// Forward Chomp on explicit square sets: every position reachable from the
/// full board, with its forward successors.
pub fn forward_chomp(rows: usize, cols: usize) -> BTreeMap<Squares, BTreeSet<Squares>> {
    let full: Squares = (0..cols)
        .flat_map(|c| (0..rows).map(move |r| (c, r)))
        .collect();
    let mut graph = BTreeMap::new();
    let mut stack = vec![full];
    while let Some(s) = stack.pop() {
        if graph.contains_key(&s) {
            continue;
        }
        let mut next = BTreeSet::new();
        for &(c0, r0) in &s {
            if (c0, r0) == (0, 0) {
                continue;
            }
            let t: Squares = s
                .iter()
                .copied()
                .filter(|&(c, r)| !(c >= c0 && r >= r0))
                .collect();
            next.insert(t.clone());
            stack.push(t);
        }
        graph.insert(s, next);
    }
    graph
}

pub fn column_heights(s: &Squares, cols: usize) -> Vec<u8> {
    (0..cols)
        .map(|c| s.iter().filter(|&&(x, _)| x == c).count() as u8)
        .collect()
}

/// Reversed Chomp predecessors by column heights, from forward play.
pub fn reversed_chomp_moves(rows: usize, cols: usize) -> BTreeMap<Vec<u8>, BTreeSet<Vec<u8>>> {
    let mut out: BTreeMap<Vec<u8>, BTreeSet<Vec<u8>>> = BTreeMap::new();
    for (s, next) in forward_chomp(rows, cols) {
        out.entry(column_heights(&s, cols)).or_default();
        for t in next {
            out.entry(column_heights(&t, cols))
                .or_default()
                .insert(column_heights(&s, cols));
        }
    }
    out
}
