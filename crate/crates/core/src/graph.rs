//! Explicit game graphs for acyclic normal-play games, with retrograde
//! labeling and path-length dynamic programs.
//!
//! States are interned into dense `u32` ids; adjacency is stored as one flat
//! target array plus a per-node range. Node 0 is the start position.

use std::hash::Hash;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use crate::error::{Error, Result};
use crate::game::{Game, Label};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Fresh,
    Open,
    Done,
}

/// The reachable graph of a game from one start position.
#[derive(Debug, Clone)]
pub struct GameGraph<S> {
    nodes: IndexSet<S, FxBuildHasher>,
    ranges: Vec<(u32, u32)>,
    targets: Vec<u32>,
    /// Post-order: every node appears after all of its successors.
    order: Vec<u32>,
}

impl<S: Clone + Eq + Hash + std::fmt::Display> GameGraph<S> {
    /// Explore everything reachable from `start`. `successors` appends the
    /// successor states of a state to the given buffer.
    ///
    /// Fails with [`Error::Cycle`] if the graph is not acyclic and with
    /// [`Error::ResourceLimit`] once more than `max_nodes` states are found.
    pub fn explore<F>(start: S, mut successors: F, max_nodes: Option<usize>) -> Result<GameGraph<S>>
    where
        F: FnMut(&S, &mut Vec<S>),
    {
        let mut nodes: IndexSet<S, FxBuildHasher> = IndexSet::default();
        nodes.insert(start);
        let mut ranges: Vec<(u32, u32)> = vec![(0, 0)];
        let mut marks: Vec<Mark> = vec![Mark::Fresh];
        let mut targets: Vec<u32> = Vec::new();
        let mut order: Vec<u32> = Vec::new();
        let mut buf: Vec<S> = Vec::new();

        // Frames are (node, next successor slot).
        let mut stack: Vec<(u32, u32)> = Vec::new();
        let mut expand = |u: u32,
                          nodes: &mut IndexSet<S, FxBuildHasher>,
                          ranges: &mut Vec<(u32, u32)>,
                          marks: &mut Vec<Mark>,
                          targets: &mut Vec<u32>|
         -> Result<()> {
            buf.clear();
            successors(&nodes[u as usize], &mut buf);
            let begin = targets.len() as u32;
            for s in buf.drain(..) {
                let (id, fresh) = nodes.insert_full(s);
                if fresh {
                    if let Some(limit) = max_nodes {
                        if nodes.len() > limit {
                            return Err(Error::ResourceLimit(format!(
                                "game graph exceeds {limit} vertices"
                            )));
                        }
                    }
                    ranges.push((0, 0));
                    marks.push(Mark::Fresh);
                }
                targets.push(id as u32);
            }
            ranges[u as usize] = (begin, targets.len() as u32);
            marks[u as usize] = Mark::Open;
            Ok(())
        };

        expand(0, &mut nodes, &mut ranges, &mut marks, &mut targets)?;
        stack.push((0, ranges[0].0));
        while let Some(top) = stack.last_mut() {
            let (u, next) = *top;
            let end = ranges[u as usize].1;
            if next < end {
                top.1 += 1;
                let v = targets[next as usize];
                match marks[v as usize] {
                    Mark::Fresh => {
                        expand(v, &mut nodes, &mut ranges, &mut marks, &mut targets)?;
                        stack.push((v, ranges[v as usize].0));
                    }
                    Mark::Open => {
                        return Err(Error::Cycle(nodes[v as usize].to_string()));
                    }
                    Mark::Done => {}
                }
            } else {
                marks[u as usize] = Mark::Done;
                order.push(u);
                stack.pop();
            }
        }

        Ok(GameGraph {
            nodes,
            ranges,
            targets,
            order,
        })
    }

    /// Explore the reachable graph of a [`Game`].
    pub fn from_game<G>(game: &G, start: S, max_nodes: Option<usize>) -> Result<GameGraph<S>>
    where
        G: Game<State = S>,
    {
        GameGraph::explore(
            start,
            |s, out| {
                for m in game.legal_moves(s) {
                    out.push(game.play(s, &m).expect("generated move is legal"));
                }
            },
            max_nodes,
        )
    }
}

impl<S: Eq + Hash> GameGraph<S> {
    pub const START: u32 = 0;

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn state(&self, id: u32) -> &S {
        &self.nodes[id as usize]
    }

    pub fn start(&self) -> &S {
        self.state(Self::START)
    }

    pub fn id_of(&self, state: &S) -> Option<u32> {
        self.nodes.get_index_of(state).map(|i| i as u32)
    }

    pub fn successors(&self, id: u32) -> &[u32] {
        let (b, e) = self.ranges[id as usize];
        &self.targets[b as usize..e as usize]
    }

    pub fn is_terminal(&self, id: u32) -> bool {
        self.successors(id).is_empty()
    }

    /// Node ids, successors before predecessors.
    pub fn topological_order(&self) -> &[u32] {
        &self.order
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        self.nodes.iter()
    }

    /// Retrograde labels for the player to move at each node.
    pub fn labels(&self) -> Vec<Label> {
        let mut labels = vec![Label::Loss; self.vertex_count()];
        for &u in &self.order {
            let win = self
                .successors(u)
                .iter()
                .any(|&v| labels[v as usize] == Label::Loss);
            labels[u as usize] = if win { Label::Win } else { Label::Loss };
        }
        labels
    }

    /// Fewest moves from each node to a terminal node.
    pub fn shortest_to_terminal(&self) -> Vec<u32> {
        self.fold_lengths(u32::min)
    }

    /// Most moves from each node to a terminal node.
    pub fn longest_to_terminal(&self) -> Vec<u32> {
        self.fold_lengths(u32::max)
    }

    fn fold_lengths(&self, pick: fn(u32, u32) -> u32) -> Vec<u32> {
        let mut len = vec![0u32; self.vertex_count()];
        for &u in &self.order {
            len[u as usize] = self
                .successors(u)
                .iter()
                .map(|&v| len[v as usize] + 1)
                .reduce(pick)
                .unwrap_or(0);
        }
        len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Subtraction game on integers: take 1 or 2.
    fn take_one_or_two(s: &u32, out: &mut Vec<u32>) {
        if *s >= 1 {
            out.push(s - 1);
        }
        if *s >= 2 {
            out.push(s - 2);
        }
    }

    #[test]
    fn labels_match_mod_three_rule() {
        let g = GameGraph::explore(10u32, take_one_or_two, None).unwrap();
        assert_eq!(g.vertex_count(), 11);
        assert_eq!(g.edge_count(), 19);
        let labels = g.labels();
        for id in 0..g.vertex_count() as u32 {
            let n = *g.state(id);
            assert_eq!(labels[id as usize] == Label::Loss, n % 3 == 0, "n = {n}");
        }
        let short = g.shortest_to_terminal();
        let long = g.longest_to_terminal();
        assert_eq!(short[0], 5);
        assert_eq!(long[0], 10);
    }

    #[test]
    fn order_is_topological() {
        let g = GameGraph::explore(12u32, take_one_or_two, None).unwrap();
        let mut pos = vec![0usize; g.vertex_count()];
        for (i, &u) in g.topological_order().iter().enumerate() {
            pos[u as usize] = i;
        }
        for u in 0..g.vertex_count() as u32 {
            for &v in g.successors(u) {
                assert!(pos[v as usize] < pos[u as usize]);
            }
        }
    }

    #[test]
    fn detects_cycles() {
        let err = GameGraph::explore(0u32, |s, out| out.push((s + 1) % 3), None).unwrap_err();
        assert!(matches!(err, Error::Cycle(_)));
    }

    #[test]
    fn enforces_node_limit() {
        let err = GameGraph::explore(100u32, take_one_or_two, Some(10)).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }
}
