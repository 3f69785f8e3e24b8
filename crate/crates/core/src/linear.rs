//! Exact rational feasibility for systems of linear constraints.
//!
//! The decision procedure is a two-phase simplex with Bland's rule over big-integer
//! rationals; it terminates on every input and never rounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    /// Constraint with integer coefficients and right-hand side.
    pub fn from_ints(coeffs: &[i64], relation: Relation, rhs: i64) -> Self {
        Constraint {
            coeffs: coeffs.iter().map(|c| Rational::from_integer((*c).into())).collect(),
            relation,
            rhs: Rational::from_integer(rhs.into()),
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(c, _)| !c.is_zero())
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(x), &self.rhs)
    }
}

/// A conjunction of linear constraints over `num_vars` unrestricted rational variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        assert_eq!(c.coeffs.len(), self.num_vars, "coefficient vector has the wrong length");
        self.constraints.push(c);
    }

    /// Adds `x_var = 0`.
    pub fn fix_zero(&mut self, var: usize) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        coeffs[var] = Rational::one();
        self.push(Constraint::new(coeffs, Relation::Eq, Rational::zero()));
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.satisfied_by(x))
    }

    /// Exact point satisfying every constraint, or `None` iff there is none.
    pub fn feasible(&self) -> Option<Vec<Rational>> {
        feasible(self)
    }
}

impl fmt::Display for LinearSystem {
    /// One constraint per line, coefficients as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# vars {} constraints {}", self.num_vars, self.constraints.len())?;
        for c in &self.constraints {
            let mut first = true;
            for (i, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{}/{}*x{i}", a.numer(), a.denom())?;
                first = false;
            }
            if first {
                write!(f, "0")?;
            }
            writeln!(f, " {} {}/{}", c.relation.symbol(), c.rhs.numer(), c.rhs.denom())?;
        }
        Ok(())
    }
}

/// How an original variable maps onto nonnegative simplex columns.
#[derive(Clone, Copy)]
enum Column {
    Fixed,
    NonNeg(usize),
    Free(usize, usize),
}

/// Decides feasibility of `sys` exactly; returns a witness point when feasible.
pub fn feasible(sys: &LinearSystem) -> Option<Vec<Rational>> {
    let n = sys.num_vars;
    let mut nonneg = vec![false; n];
    let mut fixed = vec![false; n];
    let mut rows: Vec<&Constraint> = Vec::new();

    // Presolve: single-variable sign and zero constraints become variable bounds.
    for c in &sys.constraints {
        let mut nz = c.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero());
        let first = nz.next();
        let second = nz.next();
        match (first, second) {
            (None, _) => {
                if !c.relation.holds(&Rational::zero(), &c.rhs) {
                    return None;
                }
            }
            (Some((j, a)), None) if c.rhs.is_zero() => match (c.relation, a.is_positive()) {
                (Relation::Eq, _) => fixed[j] = true,
                (Relation::Ge, true) | (Relation::Le, false) => nonneg[j] = true,
                _ => rows.push(c),
            },
            _ => rows.push(c),
        }
    }

    let mut columns = Vec::with_capacity(n);
    let mut ncols = 0;
    for j in 0..n {
        columns.push(if fixed[j] {
            Column::Fixed
        } else if nonneg[j] {
            ncols += 1;
            Column::NonNeg(ncols - 1)
        } else {
            ncols += 2;
            Column::Free(ncols - 2, ncols - 1)
        });
    }

    // Standard form: A y (+/- slack) (+ artificial) = b with b >= 0.
    let m = rows.len();
    let n_slack = rows.iter().filter(|c| c.relation != Relation::Eq).count();
    let mut dense: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(m);
    for c in &rows {
        let mut a = vec![Rational::zero(); ncols];
        for (j, coeff) in c.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            match columns[j] {
                Column::Fixed => {}
                Column::NonNeg(k) => a[k] = coeff.clone(),
                Column::Free(p, q) => {
                    a[p] = coeff.clone();
                    a[q] = -coeff.clone();
                }
            }
        }
        let (mut rel, mut b) = (c.relation, c.rhs.clone());
        if b.is_negative() {
            a.iter_mut().for_each(|v| *v = -v.clone());
            b = -b;
            rel = rel.flipped();
        }
        dense.push((a, rel, b));
    }
    let n_art = dense.iter().filter(|(_, rel, _)| *rel != Relation::Le).count();
    let width = ncols + n_slack + n_art;
    let art_start = ncols + n_slack;

    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (ncols, art_start);
    for (a, rel, b) in dense {
        let mut row = a;
        row.resize(width + 1, Rational::zero());
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        row[width] = b;
        tab.push(row);
    }

    // Phase-one objective: minimize the sum of artificials. `cost[j]` are reduced costs,
    // `cost[width]` is minus the current objective value.
    let mut cost = vec![Rational::zero(); width + 1];
    for (i, row) in tab.iter().enumerate() {
        if basis[i] >= art_start {
            for (j, v) in row.iter().enumerate() {
                if j < art_start || j == width {
                    cost[j] -= v;
                }
            }
        }
    }

    // Bland: lowest-index improving column; artificials never re-enter.
    while let Some(q) = (0..art_start).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[q].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[q];
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so an improving column always has a pivot row.
        let (r, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tab, &mut cost, r, q);
        basis[r] = q;
    }

    if !cost[width].is_zero() {
        return None;
    }

    let mut y = vec![Rational::zero(); width];
    for (i, &b) in basis.iter().enumerate() {
        y[b] = tab[i][width].clone();
    }
    let x: Vec<Rational> = columns
        .iter()
        .map(|c| match *c {
            Column::Fixed => Rational::zero(),
            Column::NonNeg(k) => y[k].clone(),
            Column::Free(p, q) => &y[p] - &y[q],
        })
        .collect();
    debug_assert!(sys.satisfied_by(&x), "simplex returned a point outside the system");
    Some(x)
}

fn pivot(tab: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, q: usize) {
    let inv = tab[r][q].recip();
    for v in tab[r].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = std::mem::take(&mut tab[r]);
    let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    let eliminate = |row: &mut Vec<Rational>| {
        let factor = row[q].clone();
        if factor.is_zero() {
            return;
        }
        for &j in &support {
            let delta = &factor * &pivot_row[j];
            row[j] -= delta;
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    let mut cost_row = cost.to_vec();
    eliminate(&mut cost_row);
    cost.clone_from_slice(&cost_row);
    tab[r] = pivot_row;
}

/// Smallest positive integer multiple of `v` (the zero vector maps to itself).
pub fn rescale_to_integers(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() || gcd.is_one() {
        scaled
    } else {
        scaled.into_iter().map(|x| x / &gcd).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|x| BigInt::from(*x)).collect()
    }

    #[test]
    fn simple_feasible_system() {
        let mut sys = LinearSystem::new(2);
        sys.push(Constraint::from_ints(&[1, -1], Relation::Le, -1));
        sys.push(Constraint::from_ints(&[1, 0], Relation::Ge, 0));
        sys.push(Constraint::from_ints(&[0, 1], Relation::Ge, 0));
        let x = sys.feasible().unwrap();
        assert!(sys.satisfied_by(&x));
    }

    #[test]
    fn contradiction_is_infeasible() {
        let mut sys = LinearSystem::new(1);
        sys.push(Constraint::from_ints(&[1], Relation::Le, -1));
        sys.push(Constraint::from_ints(&[1], Relation::Ge, 0));
        assert!(sys.feasible().is_none());
    }

    #[test]
    fn free_variables_can_go_negative() {
        let mut sys = LinearSystem::new(2);
        sys.push(Constraint::from_ints(&[1, 1], Relation::Eq, -3));
        sys.push(Constraint::from_ints(&[1, -1], Relation::Ge, 1));
        let x = sys.feasible().unwrap();
        assert!(sys.satisfied_by(&x));
    }

    #[test]
    fn empty_rows_are_checked() {
        let mut sys = LinearSystem::new(1);
        sys.push(Constraint::from_ints(&[0], Relation::Ge, 1));
        assert!(sys.feasible().is_none());
        let mut ok = LinearSystem::new(1);
        ok.push(Constraint::from_ints(&[0], Relation::Le, 1));
        assert_eq!(ok.feasible(), Some(vec![q(0, 1)]));
    }

    #[test]
    fn fixed_and_sign_presolve() {
        let mut sys = LinearSystem::new(2);
        sys.fix_zero(0);
        sys.push(Constraint::from_ints(&[0, -2], Relation::Le, 0));
        sys.push(Constraint::from_ints(&[1, 1], Relation::Ge, 1));
        let x = sys.feasible().unwrap();
        assert_eq!(x[0], q(0, 1));
        assert!(x[1] >= q(1, 1));
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale_to_integers(&[q(1, 2), q(3, 2), q(0, 1)]), ints(&[1, 3, 0]));
        assert_eq!(rescale_to_integers(&[q(2, 1), q(4, 1), q(6, 1)]), ints(&[1, 2, 3]));
        assert_eq!(rescale_to_integers(&[q(0, 1), q(0, 1), q(0, 1)]), ints(&[0, 0, 0]));
        assert_eq!(rescale_to_integers(&[q(2, 3), q(4, 9)]), ints(&[3, 2]));
    }

    #[test]
    fn dump_format() {
        let mut sys = LinearSystem::new(2);
        sys.push(Constraint::new(vec![q(1, 2), q(0, 1)], Relation::Le, q(-1, 1)));
        assert_eq!(sys.to_string(), "# vars 2 constraints 1\n1/2*x0 <= -1/1\n");
    }
}
