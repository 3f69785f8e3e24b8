//! Hitting Set → environment-restricted synthesis.

use crate::error::InstanceError;
use crate::region::{RegionDoc, SeparationAtom};
use crate::ts::TransitionSystem;

use super::instance::{solve_hs_brute, HSInstance};
use super::{Builder, GadgetKind, GadgetOutput, GadgetSource, Witness};

/// Thresholds on `lambda` assumed by the hardness argument: the general one and the
/// stricter one used for one of the auxiliary regions.
pub const HS_LAMBDA_THRESHOLDS: (usize, usize) = (5, 6);

fn x(i: usize) -> String {
    format!("X{i}")
}

fn t(i: usize, j: usize) -> String {
    format!("t{i}_{j}")
}

fn range(prefix: &str, r: std::ops::Range<usize>) -> Vec<String> {
    r.map(|i| format!("{prefix}{i}")).collect()
}

fn build_ts(inst: &HSInstance) -> TransitionSystem {
    let (m, lam) = (inst.m(), inst.lambda);
    let mut b = Builder::default();
    for i in 0..m {
        b.state(format!("bot{i}"));
    }
    for i in 0..lam {
        b.state(format!("top{i}"));
    }
    for i in 1..m {
        b.state(format!("tri{i}"));
    }
    for (i, set) in inst.sets.iter().enumerate() {
        for j in 0..set.len() + 3 {
            b.state(t(i, j));
        }
    }
    for i in 0..lam {
        b.state(format!("f{i}_0"));
        b.state(format!("f{i}_1"));
    }
    for j in 1..m {
        b.state(format!("g{j}_0"));
        b.state(format!("g{j}_1"));
    }

    b.event("k".into());
    for name in range("X", 0..inst.n)
        .into_iter()
        .chain(range("k", 0..lam))
        .chain(range("z", 0..lam))
        .chain(range("u", 1..m))
        .chain(range("v", 1..m))
        .chain(range("y", 0..m))
        .chain(range("w", 1..m))
        .chain(range("a", 0..lam))
        .chain(range("b", 0..lam))
        .chain(range("c", 1..m))
        .chain(range("d", 1..m))
    {
        b.event(name);
    }

    for (i, set) in inst.sets.iter().enumerate() {
        let mi = set.len();
        b.edge(&t(i, 0), "k", &t(i, 1));
        for (h, &elem) in set.iter().enumerate() {
            b.edge(&t(i, h + 1), &x(elem), &t(i, h + 2));
        }
        b.edge(&t(i, mi + 1), "k", &t(i, mi + 2));
        if i + 1 < m {
            b.edge(&t(i, 1), &format!("u{}", i + 1), &t(i + 1, 1));
        }
    }
    for i in 0..lam {
        let (f0, f1) = (format!("f{i}_0"), format!("f{i}_1"));
        b.edge(&f0, "k", &f1);
        b.edge(&f0, &format!("k{i}"), &f1);
        b.edge(&f1, &format!("z{i}"), &f0);
    }
    for j in 1..m {
        let (g0, g1) = (format!("g{j}_0"), format!("g{j}_1"));
        b.edge(&g1, &format!("u{j}"), &g0);
        b.edge(&g0, &format!("v{j}"), &g1);
    }
    for i in 0..m {
        b.edge(&format!("bot{i}"), &format!("y{i}"), &t(i, 0));
        if i + 1 < m {
            b.edge(&format!("bot{i}"), &format!("w{}", i + 1), &format!("bot{}", i + 1));
        }
    }
    if lam > 0 {
        b.edge("bot0", "a0", "top0");
    }
    for i in 0..lam {
        b.edge(&format!("top{i}"), &format!("b{i}"), &format!("f{i}_0"));
        if i + 1 < lam {
            b.edge(&format!("top{i}"), &format!("a{}", i + 1), &format!("top{}", i + 1));
        }
    }
    if m > 1 {
        b.edge("bot0", "c1", "tri1");
    }
    for i in 1..m {
        b.edge(&format!("tri{i}"), &format!("d{i}"), &format!("g{i}_0"));
        if i + 1 < m {
            b.edge(&format!("tri{i}"), &format!("c{}", i + 1), &format!("tri{}", i + 1));
        }
    }
    b.finish("hs_gadget", "bot0")
}

/// `(|S|, |E|, |δ|)` of the gadget for `inst`, counted from the construction rules.
pub fn hs_expected_counts(inst: &HSInstance) -> (usize, usize, usize) {
    let (n, m, lam) = (inst.n, inst.m(), inst.lambda);
    let sizes: usize = inst.sets.iter().map(Vec::len).sum();
    let states = (sizes + 3 * m) + m + lam + (m - 1) + 2 * lam + 2 * (m - 1);
    let events = 1 + n + 2 * lam + 2 * (m - 1) + m + (m - 1) + 2 * lam + 2 * (m - 1);
    let edges = (sizes + 2 * m) + (m - 1) + 3 * lam + 2 * (m - 1) + m + (m - 1) + 2 * lam + 2 * (m - 1);
    (states, events, edges)
}

fn witnesses(ts: &TransitionSystem, inst: &HSInstance, chosen: Option<&[usize]>) -> Vec<RegionDoc> {
    let (m, lam) = (inst.m(), inst.lambda);
    let sets = &inst.sets;
    let elem = |l: usize, h: usize| x(sets[l][h]);
    let last = |l: usize| x(*sets[l].last().expect("nonempty set"));
    let row = |l: usize| (0..sets[l].len() + 3).map(move |j| t(l, j));
    let ks = range("k", 0..lam);
    let zs = range("z", 0..lam);
    let mut out = Vec::new();

    let mut r0 = Witness::new(ts, "fact1.R0", 1)
        .class(1, 1, ["k".to_string()])
        .class(0, 1, range("b", 0..lam))
        .class(1, 0, ["a0".to_string(), "c1".to_string()]);
    for j in 1..m {
        r0 = r0.essa("k", &format!("g{j}_0")).essa("k", &format!("g{j}_1"));
    }
    for i in 0..lam {
        r0 = r0.essa("k", &format!("top{i}"));
    }
    for j in 1..m {
        r0 = r0.essa("k", &format!("tri{j}"));
    }
    out.push(r0.build());

    if let Some(chosen) = chosen {
        let mut r1 = Witness::new(ts, "fact1.R1", 1)
            .class(1, 0, std::iter::once("k".to_string()).chain(ks.clone()))
            .class(0, 1, chosen.iter().map(|&i| x(i)).chain(zs.clone()))
            .essa("k", &t(0, 1));
        for i in 0..lam {
            r1 = r1.essa("k", &format!("f{i}_1")).essa(&format!("k{i}"), &format!("f{i}_1"));
        }
        out.push(r1.build());
    }

    let mut r2 = Witness::new(ts, "fact1.R2", 2)
        .class(1, 0, std::iter::once("k".to_string()).chain(ks.clone()))
        .class(0, 1, zs.clone());
    for (i, set) in sets.iter().enumerate() {
        r2 = r2.essa("k", &t(i, 1)).essa("k", &t(i, set.len() + 2));
    }
    out.push(r2.build());

    // a singleton set's only element both opens and closes its row
    let ends = |i: usize| -> (Vec<String>, Vec<String>, Vec<String>) {
        if sets[i].len() == 1 {
            (vec![last(i)], vec![], vec![])
        } else {
            (vec![], vec![last(i)], vec![elem(i, 0)])
        }
    };
    let (side, closing, opening) = ends(0);
    let mut r3 = Witness::new(ts, "fact1.R3", 0)
        .class(1, 1, std::iter::once("k".to_string()).chain(side))
        .class(0, 1, ["y0".to_string(), "u1".into(), "a0".into(), "c1".into()].into_iter().chain(closing))
        .class(0, 2, ["w1".to_string()])
        .class(1, 0, opening.into_iter().chain(["v1".to_string()]))
        .essa("k", "bot0");
    for j in 2..=sets[0].len() {
        r3 = r3.essa("k", &t(0, j));
    }
    out.push(r3.build());

    for (i, set) in sets.iter().enumerate().skip(1) {
        let (side, closing, opening) = ends(i);
        let mut r4 = Witness::new(ts, &format!("fact1.R4[i={i}]"), 2)
            .class(1, 1, std::iter::once("k".to_string()).chain(side))
            .class(2, 0, [format!("w{i}")])
            .class(0, 2, [format!("w{}", i + 1)])
            .class(0, 1, [format!("y{i}"), format!("v{i}"), format!("u{}", i + 1)].into_iter().chain(closing))
            .class(1, 0, [format!("u{i}"), format!("v{}", i + 1)].into_iter().chain(opening))
            .essa("k", &format!("bot{i}"));
        for j in 2..=set.len() {
            r4 = r4.essa("k", &t(i, j));
        }
        out.push(r4.build());
    }

    for (i, set) in sets.iter().enumerate().skip(1) {
        let u = format!("u{i}");
        let mut into = vec![u.clone(), format!("w{i}"), format!("v{}", i - 1)];
        if i == 1 {
            into.extend(["a0".to_string(), "c1".to_string()]);
        }
        let mut r5 = Witness::new(ts, &format!("fact2.R5[i={i}]"), if i == 1 { 1 } else { 0 })
            .class(1, 0, into)
            .class(0, 1, [format!("w{}", i - 1), format!("u{}", i - 1), format!("d{}", i - 1), format!("v{i}")]);
        let excluded: Vec<String> = row(i - 1).chain([format!("g{}_0", i - 1)]).collect();
        for s in ts.state_names() {
            if !excluded.contains(s) {
                r5 = r5.essa_if_disabled(&u, s);
            }
        }
        out.push(r5.build());

        let mut r6 = Witness::new(ts, &format!("fact2.R6[i={i}]"), 0)
            .class(1, 1, [u.clone()])
            .class(0, 1, [format!("d{i}"), "k".into()].into_iter().chain(ks.clone()))
            .class(1, 0, zs.clone())
            .essa(&u, &format!("bot{}", i - 1))
            .essa(&u, &t(i - 1, 0));
        if i >= 2 {
            r6 = r6.essa(&u, &format!("g{}_0", i - 1));
        }
        for j in 0..lam {
            r6 = r6.essa(&format!("z{j}"), &format!("f{j}_0"));
        }
        out.push(r6.build());

        let mut r7 = Witness::new(ts, &format!("fact2.R7[i={i}]"), 1).class(1, 1, [u.clone()]).class(1, 0, [elem(i, 0)]);
        for j in 2..=set.len() + 2 {
            r7 = r7.essa(&u, &t(i - 1, j));
        }
        out.push(r7.build());
    }

    for xi in 0..inst.n {
        let name = x(xi);
        for j in (0..m).filter(|&j| !sets[j].contains(&xi)) {
            let mut into = vec![format!("w{j}"), format!("u{j}"), format!("v{}", j + 1)];
            if j > 0 {
                into.extend(["a0".to_string(), "c1".to_string()]);
            }
            let mut r8 = Witness::new(ts, &format!("fact3.R8[i={xi},j={j}]"), if j == 0 { 0 } else { 1 })
                .class(1, 1, [name.clone()])
                .class(1, 0, into)
                .class(0, 1, [format!("v{j}"), format!("w{}", j + 1), format!("u{}", j + 1), format!("d{}", j + 1)])
                .essa(&name, &format!("bot{j}"));
            for s in row(j) {
                r8 = r8.essa(&name, &s);
            }
            out.push(r8.build());
        }
        for l in (0..m).filter(|&l| sets[l].contains(&xi)) {
            let h = sets[l].iter().position(|&e| e == xi).expect("member");
            out.push(
                Witness::new(ts, &format!("fact3.R9[i={xi},l={l}]"), 0)
                    .class(1, 1, [name.clone()])
                    .class(1, 0, zs.clone())
                    .class(0, 1, std::iter::once("k".to_string()).chain(ks.clone()))
                    .essa(&name, &format!("bot{l}"))
                    .essa(&name, &t(l, 0))
                    .build(),
            );
            out.push(
                Witness::new(ts, &format!("fact3.R10[i={xi},l={l}]"), 1)
                    .class(1, 0, [name.clone(), "a0".into(), "c1".into()])
                    .essa(&name, &t(l, h + 1))
                    .essa(&name, &t(l, sets[l].len() + 2))
                    .build(),
            );
            if h == 0 {
                continue;
            }
            let mut r = if l == 0 {
                Witness::new(ts, &format!("fact3.R11[i={xi}]"), 0)
                    .class(1, 0, [name.clone(), "v1".into()])
                    .class(0, 1, ["w1".to_string(), "u1".into(), "d1".into(), elem(0, h - 1)])
            } else {
                Witness::new(ts, &format!("fact3.R12[i={xi},l={l}]"), 1)
                    .class(
                        1,
                        0,
                        [name.clone(), format!("w{l}"), format!("u{l}"), format!("v{}", l + 1), "a0".into(), "c1".into()],
                    )
                    .class(
                        0,
                        1,
                        [elem(l, h - 1), format!("w{}", l + 1), format!("u{}", l + 1), format!("v{l}"), format!("d{}", l + 1)],
                    )
            };
            for j in 1..=h {
                r = r.essa(&name, &t(l, j));
            }
            out.push(r.build());
        }
        let mut r13 = Witness::new(ts, &format!("fact3.R13[i={xi}]"), 1)
            .class(1, 1, [name.clone()])
            .class(1, 0, ["a0".to_string(), "c1".into()]);
        let excluded: Vec<String> = (0..m).flat_map(|j| row(j).chain([format!("bot{j}")])).collect();
        for s in ts.state_names() {
            if !excluded.contains(s) {
                r13 = r13.essa(&name, s);
            }
        }
        out.push(r13.build());
    }
    out
}

/// Builds the gadget for `inst`: bounds `(2λ, λ+1)`, distinguished atom `(k, t0_1)`.
pub fn build_hs_gadget(inst: &HSInstance) -> Result<GadgetOutput, InstanceError> {
    if inst.lambda == 0 {
        return Err(InstanceError::Precondition("lambda must be at least 1 to build the gadget".into()));
    }
    if inst.sets.is_empty() {
        return Err(InstanceError::Precondition("the instance needs at least one set".into()));
    }
    let ts = build_ts(inst);
    let solution = solve_hs_brute(inst);
    let witnesses = witnesses(&ts, inst, solution.as_deref());
    let (low, high) = HS_LAMBDA_THRESHOLDS;
    let mut warnings = Vec::new();
    if inst.lambda < low {
        warnings.push(format!(
            "lambda below hardness threshold: lambda = {} < {low} (one auxiliary argument assumes lambda >= {high})",
            inst.lambda
        ));
    } else if inst.lambda < high {
        warnings.push(format!("lambda = {} is below {high}, which one auxiliary argument assumes", inst.lambda));
    }
    let atom = SeparationAtom::Essa(ts.event_id("k").expect("k"), ts.state_id("t0_1").expect("t0_1"));
    Ok(GadgetOutput {
        kind: GadgetKind::HittingSet,
        source: GadgetSource::HittingSet(inst.clone()),
        rho: 2 * inst.lambda,
        kappa: inst.lambda + 1,
        pure: false,
        distinguished_atom: atom,
        witnesses,
        solution,
        warnings,
        ts,
    })
}
