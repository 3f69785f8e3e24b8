//! Linear systems whose nonnegative solutions are the regions solving one atom.
//!
//! Variables: `x0 = sup(ι)`, `x(1+i) = con(e_i)`, `x(1+n+i) = pro(e_i)`.

use num_traits::{One, Zero};

use crate::linear::{Constraint, LinearSystem, Rational, Relation};
use crate::region::SeparationAtom;
use crate::tree::SpanningTree;
use crate::ts::{EventId, TransitionSystem};

use super::SupportSelection;

pub fn con_var(e: EventId) -> usize {
    1 + e.0
}

pub fn pro_var(n: usize, e: EventId) -> usize {
    1 + n + e.0
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Coefficients of `x0 + ψ·(pro − con)`, i.e. the support reached after a path with
/// Parikh vector `psi`, when `with_initial` is set; otherwise just `ψ·(pro − con)`.
fn effect_row(n: usize, psi: &[i64], with_initial: bool) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); 1 + 2 * n];
    if with_initial {
        row[0] = Rational::one();
    }
    for (i, &k) in psi.iter().enumerate() {
        if k != 0 {
            row[1 + i] = int(-k);
            row[1 + n + i] = int(k);
        }
    }
    row
}

/// Region constraints shared by every atom: cycle equations, nonnegativity and
/// `sup(s) ≥ con(e)` for every edge.
pub fn region_constraints(ts: &TransitionSystem, tree: &SpanningTree) -> LinearSystem {
    let n = ts.num_events();
    let mut sys = LinearSystem::new(1 + 2 * n);
    for cycle in tree.fundamental_cycles() {
        sys.push(Constraint::new(effect_row(n, &cycle, false), Relation::Eq, Rational::zero()));
    }
    for v in 0..1 + 2 * n {
        let mut row = vec![Rational::zero(); 1 + 2 * n];
        row[v] = Rational::one();
        sys.push(Constraint::new(row, Relation::Ge, Rational::zero()));
    }
    for edge in ts.edges() {
        let psi: Vec<i64> = tree.parikh(edge.src).iter().map(|&c| c as i64).collect();
        let mut row = effect_row(n, &psi, true);
        row[con_var(edge.event)] -= Rational::one();
        sys.push(Constraint::new(row, Relation::Ge, Rational::zero()));
    }
    sys
}

/// One system for an ESSA, two (`≤ −1` and `≥ 1` branches) for an SSA.
pub fn build_system(ts: &TransitionSystem, tree: &SpanningTree, atom: &SeparationAtom) -> Vec<LinearSystem> {
    let base = region_constraints(ts, tree);
    separation_systems(ts, tree, &base, atom)
}

pub(crate) fn separation_systems(
    ts: &TransitionSystem,
    tree: &SpanningTree,
    base: &LinearSystem,
    atom: &SeparationAtom,
) -> Vec<LinearSystem> {
    let n = ts.num_events();
    match *atom {
        SeparationAtom::Essa(e, s) => {
            let psi: Vec<i64> = tree.parikh(s).iter().map(|&c| c as i64).collect();
            let mut row = effect_row(n, &psi, true);
            row[con_var(e)] -= Rational::one();
            let mut sys = base.clone();
            sys.push(Constraint::new(row, Relation::Le, int(-1)));
            vec![sys]
        }
        SeparationAtom::Ssa(a, b) => {
            let psi: Vec<i64> = tree
                .parikh(a)
                .iter()
                .zip(tree.parikh(b))
                .map(|(x, y)| *x as i64 - *y as i64)
                .collect();
            let row = effect_row(n, &psi, false);
            let mut below = base.clone();
            below.push(Constraint::new(row.clone(), Relation::Le, int(-1)));
            let mut above = base.clone();
            above.push(Constraint::new(row, Relation::Ge, int(1)));
            vec![below, above]
        }
    }
}

/// Adds `pro(e) = 0` for events outside `allowed_pro` and `con(e) = 0` outside `allowed_con`.
pub fn restrict_system(sys: &LinearSystem, sel: &SupportSelection) -> LinearSystem {
    let n = (sys.num_vars - 1) / 2;
    let mut out = sys.clone();
    for e in (0..n).map(EventId) {
        if !sel.allowed_pro.contains(&e) {
            out.fix_zero(pro_var(n, e));
        }
        if !sel.allowed_con.contains(&e) {
            out.fix_zero(con_var(e));
        }
    }
    out
}

/// Adds `x = 0` for the listed pro and con variables.
pub(crate) fn force_zero(sys: &LinearSystem, zero_pro: &[bool], zero_con: &[bool]) -> LinearSystem {
    let n = zero_pro.len();
    let mut out = sys.clone();
    for i in 0..n {
        if zero_pro[i] {
            out.fix_zero(pro_var(n, EventId(i)));
        }
        if zero_con[i] {
            out.fix_zero(con_var(EventId(i)));
        }
    }
    out
}
