#![allow(dead_code)]

use std::collections::HashSet;

use ersynth_core::{Edge, EventId, LinearSystem, Rational, Relation, StateId, TransitionSystem};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

type Row = (Vec<Rational>, Rational);

/// Scales a row so its first nonzero coefficient is ±1, making duplicates comparable.
fn normalized((a, b): Row) -> Row {
    match a.iter().find(|x| !x.is_zero()) {
        Some(lead) => {
            let s = lead.abs();
            (a.iter().map(|x| x / &s).collect(), b / s)
        }
        None => (a, b),
    }
}

/// Feasibility by Gaussian elimination of the equalities followed by Fourier–Motzkin
/// elimination of the remaining `a·x ≤ b` rows.
pub fn fm_feasible(sys: &LinearSystem) -> bool {
    let mut eqs: Vec<Row> = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    for c in &sys.constraints {
        match c.relation {
            Relation::Le => rows.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Ge => rows.push((c.coeffs.iter().map(|x| -x).collect(), -c.rhs.clone())),
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs.clone())),
        }
    }
    // substitute each equality's pivot variable out of every other row
    while let Some((a, b)) = eqs.pop() {
        let Some(var) = a.iter().position(|x| !x.is_zero()) else {
            if !b.is_zero() {
                return false;
            }
            continue;
        };
        let substitute = |(r, rb): Row| -> Row {
            let f = &r[var] / &a[var];
            (r.iter().zip(&a).map(|(x, y)| x - &f * y).collect(), rb - &f * &b)
        };
        eqs = eqs.into_iter().map(substitute).collect();
        rows = rows.into_iter().map(substitute).collect();
    }
    let mut remaining: Vec<usize> = (0..sys.num_vars).collect();
    while !remaining.is_empty() {
        rows = rows.into_iter().map(normalized).collect();
        rows.sort();
        rows.dedup();
        // eliminate the variable producing the fewest combinations
        let (pick, &var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let pos = rows.iter().filter(|(a, _)| a[v].is_positive()).count();
                let neg = rows.iter().filter(|(a, _)| a[v].is_negative()).count();
                pos * neg
            })
            .unwrap();
        remaining.swap_remove(pick);
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b) in rows {
            if a[var].is_positive() {
                pos.push((a, b));
            } else if a[var].is_negative() {
                neg.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let (sp, sn) = (ap[var].clone(), -an[var].clone());
                let a: Vec<Rational> = ap.iter().zip(an).map(|(x, y)| x * &sn + y * &sp).collect();
                let b = bp * &sn + bn * &sp;
                rest.push((a, b));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_negative())
}

/// A deterministic, initialized system with `1..=max_states` states over `1..=max_events` events.
pub fn random_ts(rng: &mut impl Rng, max_states: usize, max_events: usize) -> TransitionSystem {
    let ns = rng.gen_range(1..=max_states);
    let ne = rng.gen_range(1..=max_events);
    let mut succ: Vec<Vec<Option<usize>>> = vec![vec![None; ne]; ns];
    // random spanning arborescence first, so every state is reachable
    for s in 1..ns {
        loop {
            let p = rng.gen_range(0..s);
            let free: Vec<usize> = (0..ne).filter(|&e| succ[p][e].is_none()).collect();
            if let Some(&e) = free.choose(rng) {
                succ[p][e] = Some(s);
                break;
            }
        }
    }
    let density: f64 = rng.gen_range(0.0..0.6);
    for row in succ.iter_mut() {
        for slot in row.iter_mut() {
            if slot.is_none() && rng.gen_bool(density) {
                *slot = Some(rng.gen_range(0..ns));
            }
        }
    }
    let edges = (0..ns)
        .flat_map(|s| {
            let succ = &succ;
            (0..ne).filter_map(move |e| succ[s][e].map(|t| Edge { src: StateId(s), event: EventId(e), tgt: StateId(t) }))
        })
        .collect();
    let states = (0..ns).map(|i| format!("s{i}")).collect();
    let events = (0..ne).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    TransitionSystem::new(None, states, events, StateId(0), edges).expect("generator builds valid systems")
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// Isomorphism test by trying every bijection that fixes the initial states.
pub fn brute_isomorphic(a: &TransitionSystem, b: &TransitionSystem) -> bool {
    if a.num_states() != b.num_states() || a.num_edges() != b.num_edges() {
        return false;
    }
    let a_events: HashSet<&String> = a.event_names().iter().collect();
    let b_events: HashSet<&String> = b.event_names().iter().collect();
    if a_events != b_events || a.num_events() != b.num_events() {
        return false;
    }
    let ev: Vec<EventId> = a.events().map(|e| b.event_id(a.event_name(e)).unwrap()).collect();
    let b_edges: HashSet<(usize, usize, usize)> = b.edges().iter().map(|e| (e.src.0, e.event.0, e.tgt.0)).collect();
    permutations(a.num_states()).into_iter().any(|p| {
        p[a.initial().0] == b.initial().0
            && a.edges().iter().all(|e| b_edges.contains(&(p[e.src.0], ev[e.event.0].0, p[e.tgt.0])))
    })
}

/// Random relabeling of a system's states, edges listed in shuffled order.
pub fn shuffled_copy(rng: &mut impl Rng, ts: &TransitionSystem) -> TransitionSystem {
    let mut perm: Vec<usize> = (0..ts.num_states()).collect();
    perm.shuffle(rng);
    let mut names = vec![String::new(); ts.num_states()];
    for s in ts.states() {
        names[perm[s.0]] = format!("q{}", perm[s.0]);
    }
    let mut edges: Vec<Edge> = ts
        .edges()
        .iter()
        .map(|e| Edge { src: StateId(perm[e.src.0]), event: e.event, tgt: StateId(perm[e.tgt.0]) })
        .collect();
    edges.shuffle(rng);
    TransitionSystem::new(None, names, ts.event_names().to_vec(), StateId(perm[ts.initial().0]), edges).unwrap()
}

pub const A1: &str = ".states s0 s1 s2\n.events a b\n.initial s0\n.edges\ns0 a s0\ns0 b s1\ns1 a s2\n";
pub const A2: &str = ".states s0 s1\n.events a\n.initial s0\n.edges\ns0 a s1\ns1 a s0\n";
pub const A3: &str = ".states s0 s1 s2 s3\n.events a b\n.initial s0\n.edges\ns0 a s1\ns1 b s3\ns0 b s2\ns2 a s3\n";
pub const EX4: &str = "hs 4 6 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
pub const EX6: &str = "1in3 6\n0 1 2\n0 1 3\n0 2 3\n1 4 5\n2 4 5\n3 4 5\n";

pub fn zero() -> Rational {
    Rational::zero()
}
