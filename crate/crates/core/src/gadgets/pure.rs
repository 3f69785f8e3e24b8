//! Cubic monotone one-in-three 3SAT → pure environment-restricted synthesis.

use crate::region::{RegionDoc, SeparationAtom};
use crate::ts::TransitionSystem;

use super::instance::{solve_1in3_brute, OneInThreeInstance};
use super::{Builder, GadgetKind, GadgetOutput, GadgetSource, Witness};

fn x(i: usize) -> String {
    format!("X{i}")
}

fn t(i: usize, j: usize) -> String {
    format!("t{i}_{j}")
}

fn build_ts(inst: &OneInThreeInstance) -> TransitionSystem {
    let m = inst.m();
    let third = m / 3;
    let mut b = Builder::default();
    b.state("h0".into());
    b.state("h1".into());
    for i in 0..m {
        for j in 0..6 {
            b.state(t(i, j));
        }
    }
    b.event("k".into());
    for i in 0..m {
        b.event(x(i));
    }
    for i in 0..2 * third {
        b.event(format!("u{i}"));
    }
    for i in 0..m {
        for j in 0..third {
            b.event(format!("v{i}_{j}"));
        }
    }
    for i in 0..m {
        for j in 0..third {
            b.event(format!("w{i}_{j}"));
        }
    }

    b.edge("h0", "k", "h1");
    for u in 0..2 * third {
        b.edge("h1", &format!("u{u}"), "h0");
    }
    for (i, clause) in inst.clauses.iter().enumerate() {
        for (p, &var) in clause.iter().enumerate() {
            b.edge(&t(i, p), &x(var), &t(i, p + 1));
        }
        for j in 0..third {
            b.edge(&t(i, 3), &format!("v{i}_{j}"), &t(i, 4));
        }
        b.edge(&t(i, 4), "k", &t(i, 5));
        for u in 0..2 * third {
            b.edge(&t(i, 5), &format!("u{u}"), &t(i, 4));
        }
        for j in 0..third {
            b.edge("h1", &format!("w{i}_{j}"), &t(i, 0));
        }
    }
    b.finish("pure_gadget", "h0")
}

/// `(|S|, |E|, |δ|)` of the gadget for `inst`, counted from the construction rules.
pub fn one_in_three_expected_counts(inst: &OneInThreeInstance) -> (usize, usize, usize) {
    let m = inst.m();
    let third = m / 3;
    let states = 2 + 6 * m;
    let events = 1 + m + 2 * third + 2 * m * third;
    let edges = 1 + 2 * third + m * (3 + third + 1 + 2 * third + third);
    (states, events, edges)
}

fn witnesses(ts: &TransitionSystem, inst: &OneInThreeInstance, model: Option<&[usize]>) -> Vec<RegionDoc> {
    let m = inst.m();
    let third = m / 3;
    let us: Vec<String> = (0..2 * third).map(|i| format!("u{i}")).collect();
    let vs = |i: usize| (0..third).map(move |j| format!("v{i}_{j}"));
    let ws = |i: usize| (0..third).map(move |j| format!("w{i}_{j}"));
    let all_w: Vec<String> = (0..m).flat_map(ws).collect();
    let row = |i: usize| (0..6).map(move |j| t(i, j));
    let mut out = Vec::new();

    if let Some(model) = model {
        out.push(
            Witness::new(ts, "fact5.R0", 1)
                .class(1, 0, ["k".to_string()])
                .class(0, 1, model.iter().map(|&v| x(v)).chain(us.clone()))
                .essa("k", "h1")
                .build(),
        );
    }
    for i in 0..m {
        let mut r = Witness::new(ts, &format!("fact5.R1[i={i}]"), 2)
            .class(1, 0, std::iter::once("k".to_string()).chain(ws(i)))
            .class(0, 1, us.iter().cloned().chain(vs(i)));
        for j in [0, 1, 2, 3, 5] {
            r = r.essa("k", &t(i, j));
        }
        r = r.ssa("h0", "h1");
        for s in row(i) {
            r = r.ssa("h0", &s);
        }
        out.push(r.ssa("h1", &t(i, 5)).build());
    }

    let fifths: Vec<String> = (0..m).map(|i| t(i, 5)).collect();
    let mut r = Witness::new(ts, "fact6.R0", 0).class(1, 0, us.iter().chain(&all_w).cloned()).class(0, 1, ["k".to_string()]);
    for u in &us {
        for s in ts.state_names() {
            r = r.essa_if_disabled(u, s);
        }
    }
    for w in &all_w {
        for s in ts.state_names().iter().filter(|s| !fifths.contains(s)) {
            r = r.essa_if_disabled(w, s);
        }
    }
    for s in ts.state_names().iter().filter(|s| !fifths.contains(s) && *s != "h1") {
        r = r.ssa("h1", s);
    }
    out.push(r.build());
    let mut r = Witness::new(ts, "fact6.R1", 1).class(1, 0, all_w.clone());
    for w in &all_w {
        for s in &fifths {
            r = r.essa(w, s);
        }
    }
    out.push(r.build());

    for var in 0..m {
        let name = x(var);
        let occ = inst.occurrences(var);
        let mut r = Witness::new(ts, &format!("fact7.R0[i={var}]"), 0)
            .class(1, 0, [name.clone()])
            .class(0, 1, occ.iter().flat_map(|&j| ws(j)));
        let inside: Vec<String> = occ.iter().flat_map(|&j| row(j)).collect();
        for s in ts.state_names().iter().filter(|s| !inside.contains(s)) {
            r = r.essa(&name, s);
        }
        for &j in &occ {
            let p = inst.clauses[j].iter().position(|&v| v == var).expect("occurrence");
            for q in p + 1..6 {
                r = r.essa(&name, &t(j, q));
            }
        }
        out.push(r.build());
    }
    for (i, clause) in inst.clauses.iter().enumerate() {
        for j in 1..3 {
            let var = clause[j];
            let others: Vec<usize> = inst.occurrences(var).into_iter().filter(|&l| l != i).collect();
            let mut r = Witness::new(ts, &format!("fact7.R1[i={i},j={j}]"), 0)
                .class(1, 0, [x(var)])
                .class(0, 1, std::iter::once(x(clause[j - 1])).chain(others.iter().flat_map(|&l| ws(l))));
            for q in 0..j {
                r = r.essa(&x(var), &t(i, q));
            }
            out.push(r.build());
        }
    }

    for (i, clause) in inst.clauses.iter().enumerate() {
        let mut r0 = Witness::new(ts, &format!("fact8.R0[i={i}]"), 0).class(1, 0, vs(i)).class(0, 1, [x(clause[2])]);
        let mut r1 = Witness::new(ts, &format!("fact8.R1[i={i}]"), 0).class(1, 0, vs(i)).class(0, 1, ws(i));
        let own: Vec<String> = row(i).collect();
        for v in vs(i) {
            for q in [0, 1, 2, 4, 5] {
                r0 = r0.essa(&v, &t(i, q));
            }
            for s in ts.state_names().iter().filter(|s| !own.contains(s)) {
                r1 = r1.essa(&v, s);
            }
        }
        out.push(r0.build());
        out.push(r1.build());
    }

    for (i, clause) in inst.clauses.iter().enumerate() {
        let own: Vec<String> = row(i).collect();
        let mut r0 = Witness::new(ts, &format!("fact9.R0[i={i}]"), 0).class(0, 1, ws(i));
        for p in &own {
            for q in ts.state_names().iter().filter(|q| !own.contains(q)) {
                r0 = r0.ssa(p, q);
            }
        }
        out.push(r0.build());
        let mut r1 = Witness::new(ts, &format!("fact9.R1[i={i}]"), 0).class(0, 1, clause.iter().map(|&v| x(v)).chain(vs(i)));
        for p in 0..5 {
            for q in p + 1..5 {
                r1 = r1.ssa(&t(i, p), &t(i, q));
            }
        }
        out.push(r1.build());
        let mut r2 = Witness::new(ts, &format!("fact9.R2[i={i}]"), 2).class(1, 0, ["k".to_string()]).class(0, 1, us.clone());
        for p in 0..5 {
            r2 = r2.ssa(&t(i, p), &t(i, 5));
        }
        out.push(r2.build());
    }
    out
}

/// Builds the pure gadget for `inst`: bounds `(m, |E|)`, distinguished atom `(k, h1)`.
pub fn build_1in3_gadget(inst: &OneInThreeInstance) -> GadgetOutput {
    let ts = build_ts(inst);
    let solution = solve_1in3_brute(inst);
    let witnesses = witnesses(&ts, inst, solution.as_deref());
    let atom = SeparationAtom::Essa(ts.event_id("k").expect("k"), ts.state_id("h1").expect("h1"));
    let mut warnings = Vec::new();
    if inst.m() < 6 {
        warnings.push(format!(
            "m = {} is below 6; the clause state-separation witnesses need m/3 + 3 input places, more than rho = m",
            inst.m()
        ));
    }
    GadgetOutput {
        kind: GadgetKind::OneInThree,
        source: GadgetSource::OneInThree(inst.clone()),
        rho: inst.m(),
        kappa: ts.num_events(),
        pure: true,
        distinguished_atom: atom,
        witnesses,
        solution,
        warnings,
        ts,
    }
}
