//! Source instances of the two reductions and exhaustive solvers for them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{InstanceError, ParseError};
use crate::synth::Combinations;

/// Sets `M_i` over the universe `X_0..X_{n-1}` and a size budget `lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HSInstance {
    pub n: usize,
    /// Each set as strictly increasing universe indices.
    pub sets: Vec<Vec<usize>>,
    pub lambda: usize,
}

/// A cubic monotone instance: `m` variables and `m` clauses of three distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneInThreeInstance {
    pub clauses: Vec<[usize; 3]>,
}

fn normalize_set(idx: usize, mut set: Vec<usize>, n: usize) -> Result<Vec<usize>, InstanceError> {
    if set.is_empty() {
        return Err(InstanceError::EmptySet(idx));
    }
    if let Some(&bad) = set.iter().find(|&&x| x >= n) {
        return Err(InstanceError::OutOfRange { set: idx, index: bad, size: n });
    }
    set.sort_unstable();
    if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
        return Err(InstanceError::Repeated { set: idx, index: w[0] });
    }
    Ok(set)
}

/// Data lines of an instance file: comments and blank lines dropped, line numbers kept.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn number(line: usize, w: &str) -> Result<usize, ParseError> {
    w.parse().map_err(|_| ParseError::syntax(line, format!("expected a natural number, found `{w}`")))
}

impl HSInstance {
    pub fn new(n: usize, sets: Vec<Vec<usize>>, lambda: usize) -> Result<Self, InstanceError> {
        let sets = sets.into_iter().enumerate().map(|(i, s)| normalize_set(i, s, n)).collect::<Result<_, _>>()?;
        Ok(HSInstance { n, sets, lambda })
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn is_hitting_set(&self, chosen: &[usize]) -> bool {
        self.sets.iter().all(|s| s.iter().any(|x| chosen.contains(x)))
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for HSInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hs {} {} {}", self.n, self.sets.len(), self.lambda)?;
        for s in &self.sets {
            writeln!(f, "{}", s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
        }
        Ok(())
    }
}

/// Parses `hs <n> <m> <lambda>` followed by `m` lines of universe indices.
pub fn parse_hs(text: &str) -> Result<HSInstance, InstanceError> {
    let mut lines = data_lines(text);
    let (line, header) = lines.next().ok_or_else(|| ParseError::syntax(1, "empty instance"))?;
    if header.len() != 4 || header[0] != "hs" {
        return Err(ParseError::syntax(line, "expected `hs <n> <m> <lambda>`").into());
    }
    let (n, m, lambda) = (number(line, header[1])?, number(line, header[2])?, number(line, header[3])?);
    let mut sets = Vec::with_capacity(m);
    for (line, words) in lines {
        if sets.len() == m {
            return Err(ParseError::syntax(line, format!("more than {m} sets")).into());
        }
        sets.push(words.iter().map(|w| number(line, w)).collect::<Result<Vec<_>, _>>()?);
    }
    if sets.len() != m {
        return Err(ParseError::syntax(text.lines().count(), format!("expected {m} sets, found {}", sets.len())).into());
    }
    HSInstance::new(n, sets, lambda)
}

impl OneInThreeInstance {
    pub fn new(clauses: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        let m = clauses.len();
        if !m.is_multiple_of(3) {
            return Err(InstanceError::NotMultipleOfThree(m));
        }
        let mut out = Vec::with_capacity(m);
        for (i, c) in clauses.into_iter().enumerate() {
            if c.len() != 3 {
                return Err(InstanceError::ClauseSize { clause: i, size: c.len() });
            }
            let c = normalize_set(i, c, usize::MAX)?;
            out.push([c[0], c[1], c[2]]);
        }
        let vars = out.iter().flatten().map(|x| x + 1).max().unwrap_or(0);
        if vars != m {
            return Err(InstanceError::CountMismatch { clauses: m, vars });
        }
        let mut count = vec![0; m];
        for x in out.iter().flatten() {
            count[*x] += 1;
        }
        if let Some((var, &count)) = count.iter().enumerate().find(|(_, c)| **c != 3) {
            return Err(InstanceError::NotCubic { var, count });
        }
        Ok(OneInThreeInstance { clauses: out })
    }

    /// Number of clauses, equal to the number of variables.
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// The three clauses containing variable `x`, in increasing order.
    pub fn occurrences(&self, x: usize) -> Vec<usize> {
        (0..self.m()).filter(|&i| self.clauses[i].contains(&x)).collect()
    }

    pub fn is_model(&self, chosen: &[usize]) -> bool {
        self.clauses.iter().all(|c| c.iter().filter(|x| chosen.contains(x)).count() == 1)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for OneInThreeInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "1in3 {}", self.m())?;
        for [a, b, c] in &self.clauses {
            writeln!(f, "{a} {b} {c}")?;
        }
        Ok(())
    }
}

/// Parses `1in3 <m>` followed by `m` lines of exactly three variable indices.
pub fn parse_1in3(text: &str) -> Result<OneInThreeInstance, InstanceError> {
    let mut lines = data_lines(text);
    let (line, header) = lines.next().ok_or_else(|| ParseError::syntax(1, "empty instance"))?;
    if header.len() != 2 || header[0] != "1in3" {
        return Err(ParseError::syntax(line, "expected `1in3 <m>`").into());
    }
    let m = number(line, header[1])?;
    let mut clauses = Vec::with_capacity(m);
    for (line, words) in lines {
        if clauses.len() == m {
            return Err(ParseError::syntax(line, format!("more than {m} clauses")).into());
        }
        clauses.push(words.iter().map(|w| number(line, w)).collect::<Result<Vec<_>, _>>()?);
    }
    if clauses.len() != m {
        return Err(ParseError::syntax(text.lines().count(), format!("expected {m} clauses, found {}", clauses.len())).into());
    }
    OneInThreeInstance::new(clauses)
}

/// A smallest hitting set, provided one of size at most `lambda` exists. Subsets are
/// tried by size, then lexicographically.
pub fn solve_hs_brute(inst: &HSInstance) -> Option<Vec<usize>> {
    (0..=inst.lambda.min(inst.n))
        .flat_map(|k| Combinations::new(inst.n, k))
        .find(|c| inst.is_hitting_set(c))
}

/// The lexicographically first one-in-three model. Every model of a cubic instance
/// has exactly `m/3` variables, so only subsets of that size are tried.
pub fn solve_1in3_brute(inst: &OneInThreeInstance) -> Option<Vec<usize>> {
    Combinations::new(inst.m(), inst.m() / 3).find(|c| inst.is_model(c))
}
