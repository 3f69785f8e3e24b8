//! Exhaustive region enumeration for small systems.
//!
//! Every `(sup(ι), con, pro)` with entries in `0..=value_bound` is visited (after pruning
//! branches that cannot be coherent), independently of the linear-programming path.

use std::ops::ControlFlow;

use crate::region::{Region, SeparationAtom};
use crate::tree::SpanningTree;
use crate::ts::{EventId, TransitionSystem};

/// Search limits for the enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    pub value_bound: u64,
    pub rho: usize,
    pub kappa: usize,
    pub pure: bool,
}

struct Plan {
    /// Events in assignment order.
    order: Vec<EventId>,
    /// States whose support becomes known once `k` events are assigned, parents first.
    determined: Vec<Vec<usize>>,
    /// Edges `(src, event, tgt)` fully checkable once `k` events are assigned.
    checks: Vec<Vec<(usize, usize, usize)>>,
    /// Level at which each state's support is known.
    state_level: Vec<usize>,
    event_level: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
}

impl Plan {
    fn new(ts: &TransitionSystem) -> Self {
        let tree = SpanningTree::new(ts);
        let ne = ts.num_events();
        let mut order: Vec<EventId> = Vec::with_capacity(ne);
        let mut placed = vec![false; ne];
        for s in tree.bfs_order() {
            if let Some((_, e)) = tree.parent(*s) {
                if !placed[e.0] {
                    placed[e.0] = true;
                    order.push(e);
                }
            }
        }
        for e in ts.events() {
            if !placed[e.0] {
                order.push(e);
            }
        }
        let mut event_level = vec![0; ne];
        for (k, e) in order.iter().enumerate() {
            event_level[e.0] = k + 1;
        }

        let ns = ts.num_states();
        let mut state_level = vec![0; ns];
        let mut parent = vec![None; ns];
        for s in tree.bfs_order() {
            if let Some((p, e)) = tree.parent(*s) {
                state_level[s.0] = state_level[p.0].max(event_level[e.0]);
                parent[s.0] = Some((p.0, e.0));
            }
        }
        let mut determined = vec![Vec::new(); ne + 1];
        for s in tree.bfs_order() {
            determined[state_level[s.0]].push(s.0);
        }
        let mut checks = vec![Vec::new(); ne + 1];
        for edge in ts.edges() {
            let lvl = state_level[edge.src.0].max(state_level[edge.tgt.0]).max(event_level[edge.event.0]);
            checks[lvl].push((edge.src.0, edge.event.0, edge.tgt.0));
        }
        Plan { order, determined, checks, state_level, event_level, parent }
    }
}

struct Search<'a, F> {
    plan: &'a Plan,
    bounds: OracleBounds,
    atom: Option<SeparationAtom>,
    sup: Vec<i64>,
    con: Vec<u64>,
    pro: Vec<u64>,
    n_con: usize,
    n_pro: usize,
    visit: F,
}

impl<F: FnMut(&[i64], &[u64], &[u64]) -> ControlFlow<()>> Search<'_, F> {
    /// Fills in supports determined at `level` and runs that level's checks.
    fn settle(&mut self, level: usize) -> bool {
        for &s in &self.plan.determined[level] {
            if let Some((p, e)) = self.plan.parent[s] {
                let v = self.sup[p] - self.con[e] as i64 + self.pro[e] as i64;
                if v < 0 {
                    return false;
                }
                self.sup[s] = v;
            }
        }
        for &(s, e, t) in &self.plan.checks[level] {
            if (self.con[e] as i64) > self.sup[s] || self.sup[t] != self.sup[s] - self.con[e] as i64 + self.pro[e] as i64 {
                return false;
            }
        }
        match self.atom {
            Some(SeparationAtom::Essa(e, s))
                if level == self.plan.state_level[s.0].max(self.plan.event_level[e.0]) =>
            {
                self.sup[s.0] < self.con[e.0] as i64
            }
            Some(SeparationAtom::Ssa(a, b)) if level == self.plan.state_level[a.0].max(self.plan.state_level[b.0]) => {
                self.sup[a.0] != self.sup[b.0]
            }
            _ => true,
        }
    }

    fn descend(&mut self, level: usize) -> ControlFlow<()> {
        if level == self.plan.order.len() {
            return (self.visit)(&self.sup, &self.con, &self.pro);
        }
        let e = self.plan.order[level].0;
        let b = self.bounds.value_bound;
        for c in 0..=b {
            if c > 0 && self.n_con >= self.bounds.kappa {
                break;
            }
            for p in 0..=b {
                if p > 0 && (self.n_pro >= self.bounds.rho || (self.bounds.pure && c > 0)) {
                    break;
                }
                self.con[e] = c;
                self.pro[e] = p;
                self.n_con += (c > 0) as usize;
                self.n_pro += (p > 0) as usize;
                let flow = if self.settle(level + 1) { self.descend(level + 1) } else { ControlFlow::Continue(()) };
                self.n_con -= (c > 0) as usize;
                self.n_pro -= (p > 0) as usize;
                flow?;
            }
        }
        self.con[e] = 0;
        self.pro[e] = 0;
        ControlFlow::Continue(())
    }
}

fn search(
    ts: &TransitionSystem,
    bounds: OracleBounds,
    atom: Option<SeparationAtom>,
    mut visit: impl FnMut(&Region) -> ControlFlow<()>,
) {
    let plan = Plan::new(ts);
    let ne = ts.num_events();
    for init in 0..=bounds.value_bound {
        let mut s = Search {
            plan: &plan,
            bounds,
            atom,
            sup: vec![0; ts.num_states()],
            con: vec![0; ne],
            pro: vec![0; ne],
            n_con: 0,
            n_pro: 0,
            visit: |sup: &[i64], con: &[u64], pro: &[u64]| {
                let r = Region {
                    sup: sup.iter().map(|v| *v as u64).collect(),
                    con: con.to_vec(),
                    pro: pro.to_vec(),
                };
                visit(&r)
            },
        };
        s.sup[ts.initial().0] = init as i64;
        if !s.settle(0) {
            continue;
        }
        if s.descend(0).is_break() {
            return;
        }
    }
}

/// Visits every region with values in `0..=value_bound` that respects the bounds.
/// The visitor may stop the enumeration early by returning `Break`.
pub fn for_each_region(ts: &TransitionSystem, bounds: OracleBounds, visit: impl FnMut(&Region) -> ControlFlow<()>) {
    search(ts, bounds, None, visit)
}

/// Visits every bounded region that solves `atom`.
pub fn for_each_solving_region(
    ts: &TransitionSystem,
    atom: SeparationAtom,
    bounds: OracleBounds,
    visit: impl FnMut(&Region) -> ControlFlow<()>,
) {
    search(ts, bounds, Some(atom), visit)
}

/// The lexicographically least `(sup(ι), con, pro)` region solving `atom` within the
/// bounds, or `None` if no region with values up to `value_bound` does.
pub fn brute_force_region(ts: &TransitionSystem, atom: SeparationAtom, bounds: OracleBounds) -> Option<Region> {
    let mut best: Option<(Vec<u64>, Region)> = None;
    for_each_solving_region(ts, atom, bounds, |r| {
        debug_assert!(r.solves(&atom));
        let key = r.key(ts);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, r.clone()));
        }
        ControlFlow::Continue(())
    });
    best.map(|(_, r)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::atoms;
    use crate::ts::{parse_ts, StateId};

    const A1: &str = ".states s0 s1 s2\n.events a b\n.initial s0\n.edges\ns0 a s0\ns0 b s1\ns1 a s2\n";
    const A2: &str = ".states s0 s1\n.events a\n.initial s0\n.edges\ns0 a s1\ns1 a s0\n";
    const A3: &str = ".states s0 s1 s2 s3\n.events a b\n.initial s0\n.edges\ns0 a s1\ns1 b s3\ns0 b s2\ns2 a s3\n";

    fn unrestricted(ts: &TransitionSystem, b: u64) -> OracleBounds {
        OracleBounds { value_bound: b, rho: ts.num_events(), kappa: ts.num_events(), pure: false }
    }

    #[test]
    fn finds_r1_for_a3() {
        let ts = parse_ts(A3).unwrap();
        let a = ts.event_id("a").unwrap();
        let r = brute_force_region(&ts, SeparationAtom::Essa(a, StateId(1)), unrestricted(&ts, 1)).unwrap();
        assert_eq!((r.sup[0], r.con.clone(), r.pro.clone()), (1, vec![1, 0], vec![0, 0]));
        assert_eq!(r.sup, vec![1, 0, 1, 0]);
    }

    #[test]
    fn unsolvable_atoms_of_examples_one_and_two() {
        let a2 = parse_ts(A2).unwrap();
        assert!(brute_force_region(&a2, SeparationAtom::ssa(StateId(0), StateId(1)), unrestricted(&a2, 3)).is_none());
        let a1 = parse_ts(A1).unwrap();
        let a = a1.event_id("a").unwrap();
        assert!(brute_force_region(&a1, SeparationAtom::Essa(a, StateId(2)), unrestricted(&a1, 3)).is_none());
    }

    /// Plain enumeration of every value vector, for cross-checking the pruned search.
    fn naive(ts: &TransitionSystem, b: u64) -> Vec<Vec<u64>> {
        let n = 1 + 2 * ts.num_events();
        let mut out = Vec::new();
        let mut v = vec![0u64; n];
        loop {
            let ne = ts.num_events();
            if let Ok(r) = Region::from_initial(ts, v[0], v[1..1 + ne].to_vec(), v[1 + ne..].to_vec()) {
                out.push(r.key(ts));
            }
            let mut i = n;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if v[i] < b {
                    v[i] += 1;
                    break;
                }
                v[i] = 0;
            }
        }
    }

    #[test]
    fn pruned_enumeration_matches_naive_enumeration() {
        for text in [A1, A2, A3] {
            let ts = parse_ts(text).unwrap();
            let mut seen = Vec::new();
            for_each_region(&ts, unrestricted(&ts, 2), |r| {
                r.check(&ts).unwrap();
                seen.push(r.key(&ts));
                ControlFlow::Continue(())
            });
            seen.sort();
            assert_eq!(seen, naive(&ts, 2));
        }
    }

    #[test]
    fn bounds_are_respected() {
        let ts = parse_ts(A3).unwrap();
        let bounds = OracleBounds { value_bound: 2, rho: 0, kappa: 1, pure: true };
        for atom in atoms(&ts) {
            for_each_solving_region(&ts, atom, bounds, |r| {
                assert!(r.solves(&atom) && r.is_pure());
                let (pre, post) = r.environment();
                assert!(pre == 0 && post <= 1);
                ControlFlow::Continue(())
            });
        }
    }
}
