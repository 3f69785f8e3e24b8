//! Breadth-first spanning trees, Parikh vectors and fundamental cycles.

use std::collections::VecDeque;

use crate::ts::{Edge, EventId, StateId, TransitionSystem};

/// Per-event occurrence counts along the tree path from the initial state.
pub type ParikhVector = Vec<u32>;

/// Per-event integer vector of a fundamental cycle (entries may be negative).
pub type CycleVector = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    tree_edges: Vec<Edge>,
    parent: Vec<Option<(StateId, EventId)>>,
    chords: Vec<Edge>,
    parikh: Vec<ParikhVector>,
    /// States in BFS discovery order.
    order: Vec<StateId>,
}

impl SpanningTree {
    /// BFS from the initial state, expanding outgoing edges in canonical event order.
    ///
    /// Edges that reach an already discovered state (self-loops included) become chords,
    /// listed in the order the traversal meets them.
    pub fn new(ts: &TransitionSystem) -> Self {
        let ns = ts.num_states();
        let ne = ts.num_events();
        let mut parent = vec![None; ns];
        let mut discovered = vec![false; ns];
        let mut parikh = vec![vec![0u32; ne]; ns];
        let mut tree_edges = Vec::with_capacity(ns.saturating_sub(1));
        let mut chords = Vec::new();
        let mut order = Vec::with_capacity(ns);

        let root = ts.initial();
        discovered[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for (e, t) in ts.outgoing(s) {
                let edge = Edge { src: s, event: e, tgt: t };
                if discovered[t.0] {
                    chords.push(edge);
                } else {
                    discovered[t.0] = true;
                    parent[t.0] = Some((s, e));
                    let mut psi = parikh[s.0].clone();
                    psi[e.0] += 1;
                    parikh[t.0] = psi;
                    tree_edges.push(edge);
                    queue.push_back(t);
                }
            }
        }
        SpanningTree { tree_edges, parent, chords, parikh, order }
    }

    pub fn tree_edges(&self) -> &[Edge] {
        &self.tree_edges
    }

    pub fn chords(&self) -> &[Edge] {
        &self.chords
    }

    pub fn parent(&self, s: StateId) -> Option<(StateId, EventId)> {
        self.parent[s.0]
    }

    /// States in the order the traversal discovered them; parents precede children.
    pub fn bfs_order(&self) -> &[StateId] {
        &self.order
    }

    pub fn parikh(&self, s: StateId) -> &ParikhVector {
        &self.parikh[s.0]
    }

    /// Depth of `s` in the tree (length of its path from the root).
    pub fn depth(&self, s: StateId) -> u32 {
        self.parikh[s.0].iter().sum()
    }

    /// Returns `None` when `chord` is not one of this tree's chords.
    pub fn fundamental_cycle(&self, chord: &Edge) -> Option<CycleVector> {
        if !self.chords.contains(chord) {
            return None;
        }
        let from = &self.parikh[chord.src.0];
        let to = &self.parikh[chord.tgt.0];
        let mut cycle: CycleVector = from.iter().zip(to).map(|(a, b)| *a as i64 - *b as i64).collect();
        cycle[chord.event.0] += 1;
        Some(cycle)
    }

    pub fn fundamental_cycles(&self) -> impl Iterator<Item = CycleVector> + '_ {
        self.chords.iter().map(|c| self.fundamental_cycle(c).expect("own chord"))
    }
}
