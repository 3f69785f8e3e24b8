//! Input families shared by the benchmarks.

use ersynth_core::gadgets::{parse_1in3, parse_hs, HSInstance, OneInThreeInstance};
use ersynth_core::{parse_ts, Constraint, LinearSystem, Relation, TransitionSystem};

/// `k` independent events, each firing once: the `2^k`-state hypercube.
pub fn hypercube(k: usize) -> TransitionSystem {
    let n = 1usize << k;
    let mut text = String::from(".states");
    for s in 0..n {
        text.push_str(&format!(" s{s}"));
    }
    text.push_str("\n.events");
    for e in 0..k {
        text.push_str(&format!(" e{e}"));
    }
    text.push_str("\n.initial s0\n.edges\n");
    for s in 0..n {
        for e in 0..k {
            if s & (1 << e) == 0 {
                text.push_str(&format!("s{s} e{e} s{}\n", s | (1 << e)));
            }
        }
    }
    parse_ts(&text).expect("hypercube text")
}

/// A single event cycling through `n` states.
pub fn ring(n: usize) -> TransitionSystem {
    let names: Vec<String> = (0..n).map(|s| format!("s{s}")).collect();
    let mut text = format!(".states {}\n.events a\n.initial s0\n.edges\n", names.join(" "));
    for s in 0..n {
        text.push_str(&format!("s{s} a s{}\n", (s + 1) % n));
    }
    parse_ts(&text).expect("ring text")
}

pub fn hs_instance() -> HSInstance {
    parse_hs("hs 4 6 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").expect("hs instance")
}

pub fn one_in_three_instance() -> OneInThreeInstance {
    parse_1in3("1in3 6\n0 1 2\n0 1 3\n0 2 3\n1 4 5\n2 4 5\n3 4 5\n").expect("1in3 instance")
}

/// Dense feasible system: `x_i - x_{i+1} <= 1`, pairwise sums bounded, one equality.
pub fn banded_system(vars: usize) -> LinearSystem {
    let mut constraints = Vec::new();
    for i in 0..vars {
        let mut c = vec![0; vars];
        c[i] = 1;
        constraints.push(Constraint::from_ints(&c, Relation::Ge, 0));
        if i + 1 < vars {
            c[i + 1] = -1;
            constraints.push(Constraint::from_ints(&c, Relation::Le, 1));
            c[i + 1] = 2;
            constraints.push(Constraint::from_ints(&c, Relation::Ge, (i % 3) as i64 + 1));
        }
    }
    constraints.push(Constraint::from_ints(&vec![1; vars], Relation::Eq, vars as i64 * 2));
    LinearSystem { num_vars: vars, constraints }
}
