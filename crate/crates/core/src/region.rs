//! Regions of a transition system and the separation atoms they solve.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, RegionError};
use crate::ts::{EventId, StateId, TransitionSystem};

/// A region `(sup, con, pro)`. Doubles as a Petri-net place: `sup(ι)` is the initial
/// marking, `con`/`pro` the flow weights towards/from each transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub sup: Vec<u64>,
    pub con: Vec<u64>,
    pub pro: Vec<u64>,
}

impl Region {
    /// Expands `sup(ι)`, `con` and `pro` into a full region, checking coherence on every edge.
    pub fn from_initial(
        ts: &TransitionSystem,
        sup_init: u64,
        con: Vec<u64>,
        pro: Vec<u64>,
    ) -> Result<Region, RegionError> {
        assert_eq!(con.len(), ts.num_events());
        assert_eq!(pro.len(), ts.num_events());
        let mut sup: Vec<Option<i128>> = vec![None; ts.num_states()];
        sup[ts.initial().0] = Some(sup_init as i128);
        let mut queue = VecDeque::from([ts.initial()]);
        while let Some(s) = queue.pop_front() {
            let here = sup[s.0].expect("queued states carry a support");
            for (e, t) in ts.outgoing(s) {
                let c = con[e.0];
                if here < c as i128 {
                    return Err(RegionError::InsufficientSupport {
                        src: ts.state_name(s).into(),
                        event: ts.event_name(e).into(),
                        tgt: ts.state_name(t).into(),
                        support: here,
                        con: c,
                    });
                }
                let next = here - c as i128 + pro[e.0] as i128;
                match sup[t.0] {
                    None => {
                        sup[t.0] = Some(next);
                        queue.push_back(t);
                    }
                    Some(existing) if existing != next => {
                        return Err(RegionError::Conflict {
                            src: ts.state_name(s).into(),
                            event: ts.event_name(e).into(),
                            tgt: ts.state_name(t).into(),
                            forced: next,
                            existing,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        let sup = sup
            .into_iter()
            .map(|v| u64::try_from(v.expect("initialized system")).map_err(|_| RegionError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Region { sup, con, pro })
    }

    /// Re-checks both region conditions on every edge of `ts`.
    pub fn check(&self, ts: &TransitionSystem) -> Result<(), RegionError> {
        if self.sup.len() != ts.num_states() || self.con.len() != ts.num_events() || self.pro.len() != ts.num_events() {
            return Err(RegionError::Mismatch("region dimensions do not match the system".into()));
        }
        for edge in ts.edges() {
            let (s, e, t) = (edge.src.0, edge.event.0, edge.tgt.0);
            if self.con[e] > self.sup[s] {
                return Err(RegionError::InsufficientSupport {
                    src: ts.state_name(edge.src).into(),
                    event: ts.event_name(edge.event).into(),
                    tgt: ts.state_name(edge.tgt).into(),
                    support: self.sup[s] as i128,
                    con: self.con[e],
                });
            }
            let next = self.sup[s] as i128 - self.con[e] as i128 + self.pro[e] as i128;
            if next != self.sup[t] as i128 {
                return Err(RegionError::Conflict {
                    src: ts.state_name(edge.src).into(),
                    event: ts.event_name(edge.event).into(),
                    tgt: ts.state_name(edge.tgt).into(),
                    forced: next,
                    existing: self.sup[t] as i128,
                });
            }
        }
        Ok(())
    }

    pub fn sup_of(&self, s: StateId) -> u64 {
        self.sup[s.0]
    }

    /// Events with `pro(e) > 0`.
    pub fn preset(&self) -> impl Iterator<Item = EventId> + '_ {
        self.pro.iter().enumerate().filter(|(_, p)| **p > 0).map(|(e, _)| EventId(e))
    }

    /// Events with `con(e) > 0`.
    pub fn postset(&self) -> impl Iterator<Item = EventId> + '_ {
        self.con.iter().enumerate().filter(|(_, c)| **c > 0).map(|(e, _)| EventId(e))
    }

    /// `(|preset|, |postset|)`.
    pub fn environment(&self) -> (usize, usize) {
        (self.preset().count(), self.postset().count())
    }

    pub fn is_pure(&self) -> bool {
        self.con.iter().zip(&self.pro).all(|(c, p)| *c == 0 || *p == 0)
    }

    pub fn solves(&self, atom: &SeparationAtom) -> bool {
        match *atom {
            SeparationAtom::Ssa(s, t) => self.sup[s.0] != self.sup[t.0],
            SeparationAtom::Essa(e, s) => self.sup[s.0] < self.con[e.0],
        }
    }

    /// The vector `(sup(ι), con, pro)` that determines the region.
    pub fn key(&self, ts: &TransitionSystem) -> Vec<u64> {
        let mut k = Vec::with_capacity(1 + 2 * self.con.len());
        k.push(self.sup[ts.initial().0]);
        k.extend_from_slice(&self.con);
        k.extend_from_slice(&self.pro);
        k
    }

    /// Implicit form: initial support plus the non-default `(c, p)` event classes.
    pub fn to_spec(&self, ts: &TransitionSystem) -> RegionSpec {
        let mut classes: BTreeMap<(u64, u64), Vec<String>> = BTreeMap::new();
        for e in ts.events() {
            let cp = (self.con[e.0], self.pro[e.0]);
            if cp != (0, 0) {
                classes.entry(cp).or_default().push(ts.event_name(e).to_string());
            }
        }
        RegionSpec { sup_init: self.sup[ts.initial().0], classes: classes.into_iter().collect() }
    }
}

/// Implicit region description: `sup(ι)` and events grouped into `(con, pro)` classes.
/// Events not listed in any class get `(0, 0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub sup_init: u64,
    pub classes: Vec<((u64, u64), Vec<String>)>,
}

impl RegionSpec {
    pub fn new(sup_init: u64) -> Self {
        RegionSpec { sup_init, classes: Vec::new() }
    }

    /// Adds a class; an existing `(c, p)` class is extended.
    pub fn class<I, S>(mut self, c: u64, p: u64, events: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let events: Vec<String> = events.into_iter().map(Into::into).collect();
        match self.classes.iter_mut().find(|(cp, _)| *cp == (c, p)) {
            Some((_, list)) => list.extend(events),
            None => self.classes.push(((c, p), events)),
        }
        self
    }

    /// Resolves the classes into per-event `(con, pro)` vectors.
    pub fn weights(&self, ts: &TransitionSystem) -> Result<(Vec<u64>, Vec<u64>), RegionError> {
        let ne = ts.num_events();
        let mut assigned: Vec<Option<(u64, u64)>> = vec![None; ne];
        for ((c, p), events) in &self.classes {
            for name in events {
                let e = ts.event_id(name).ok_or_else(|| RegionError::UnknownEvent(name.clone()))?;
                match assigned[e.0] {
                    Some(prev) if prev != (*c, *p) => {
                        return Err(RegionError::OverlappingClasses {
                            event: name.clone(),
                            c1: prev.0,
                            p1: prev.1,
                            c2: *c,
                            p2: *p,
                        })
                    }
                    _ => assigned[e.0] = Some((*c, *p)),
                }
            }
        }
        let con = assigned.iter().map(|a| a.map_or(0, |x| x.0)).collect();
        let pro = assigned.iter().map(|a| a.map_or(0, |x| x.1)).collect();
        Ok((con, pro))
    }
}

/// Propagates `sup(ι)` through the system and returns the full region, or names the
/// first edge where the specification is incoherent.
pub fn expand_region_spec(ts: &TransitionSystem, spec: &RegionSpec) -> Result<Region, RegionError> {
    let (con, pro) = spec.weights(ts)?;
    Region::from_initial(ts, spec.sup_init, con, pro)
}

/// A state separation atom (unordered pair of distinct states) or an event/state
/// separation atom `(e, s)` with `e` not enabled at `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeparationAtom {
    Ssa(StateId, StateId),
    Essa(EventId, StateId),
}

impl SeparationAtom {
    /// SSA with its states in canonical order.
    pub fn ssa(a: StateId, b: StateId) -> Self {
        assert_ne!(a, b, "a state separation atom needs two distinct states");
        SeparationAtom::Ssa(a.min(b), a.max(b))
    }

    pub fn is_ssa(&self) -> bool {
        matches!(self, SeparationAtom::Ssa(..))
    }

    /// Human form: `(s,s')` or `(e,s)`.
    pub fn label(&self, ts: &TransitionSystem) -> String {
        match *self {
            SeparationAtom::Ssa(a, b) => format!("({},{})", ts.state_name(a), ts.state_name(b)),
            SeparationAtom::Essa(e, s) => format!("({},{})", ts.event_name(e), ts.state_name(s)),
        }
    }

    /// Command-line form: `ssa:s,s'` or `essa:e,s`.
    pub fn spec(&self, ts: &TransitionSystem) -> String {
        match *self {
            SeparationAtom::Ssa(a, b) => format!("ssa:{},{}", ts.state_name(a), ts.state_name(b)),
            SeparationAtom::Essa(e, s) => format!("essa:{},{}", ts.event_name(e), ts.state_name(s)),
        }
    }

    /// Parses `ssa:s,s'` or `essa:e,s` against `ts`; rejects atoms that do not exist.
    pub fn parse(text: &str, ts: &TransitionSystem) -> Result<Self, String> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| format!("atom `{text}`: expected ssa:s,s' or essa:e,s"))?;
        let (x, y) = rest.split_once(',').ok_or_else(|| format!("atom `{text}`: expected two comma-separated ids"))?;
        let state = |n: &str| ts.state_id(n).ok_or_else(|| format!("atom `{text}`: unknown state {n}"));
        match kind {
            "ssa" => {
                let (a, b) = (state(x)?, state(y)?);
                if a == b {
                    return Err(format!("atom `{text}`: states must differ"));
                }
                Ok(SeparationAtom::ssa(a, b))
            }
            "essa" => {
                let e = ts.event_id(x).ok_or_else(|| format!("atom `{text}`: unknown event {x}"))?;
                let s = state(y)?;
                if ts.delta(s, e).is_some() {
                    return Err(format!("atom `{text}`: {x} is enabled at {y}"));
                }
                Ok(SeparationAtom::Essa(e, s))
            }
            other => Err(format!("atom `{text}`: unknown kind {other}")),
        }
    }
}

/// All SSAs in canonical pair order, then all ESSAs in `(event, state)` order.
pub fn atoms(ts: &TransitionSystem) -> Vec<SeparationAtom> {
    let ns = ts.num_states();
    let mut out = Vec::with_capacity(ns * ns.saturating_sub(1) / 2 + ns * ts.num_events());
    for a in 0..ns {
        for b in a + 1..ns {
            out.push(SeparationAtom::Ssa(StateId(a), StateId(b)));
        }
    }
    for e in ts.events() {
        for s in ts.states() {
            if ts.delta(s, e).is_none() {
                out.push(SeparationAtom::Essa(e, s));
            }
        }
    }
    out
}

/// Atoms of `ts` solved by `r`, ESSAs first. Each solved SSA is oriented with the
/// higher-support state first.
pub fn solved_atoms_report(ts: &TransitionSystem, r: &Region) -> Vec<String> {
    let mut essas = Vec::new();
    let mut ssas = Vec::new();
    for atom in atoms(ts) {
        if !r.solves(&atom) {
            continue;
        }
        match atom {
            SeparationAtom::Essa(..) => essas.push(atom.label(ts)),
            SeparationAtom::Ssa(a, b) => {
                let (hi, lo) = if r.sup[a.0] > r.sup[b.0] { (a, b) } else { (b, a) };
                ssas.push((hi, lo));
            }
        }
    }
    ssas.sort();
    essas
        .into_iter()
        .chain(ssas.into_iter().map(|(a, b)| format!("({},{})", ts.state_name(a), ts.state_name(b))))
        .collect()
}

/// One region block of a region file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub name: String,
    pub spec: RegionSpec,
    /// Optional expanded support, `state=value`.
    pub support: Option<Vec<(String, u64)>>,
    pub con: Option<Vec<(String, u64)>>,
    pub pro: Option<Vec<(String, u64)>>,
    /// Atoms the region is claimed to solve, in command-line syntax.
    pub claims: Vec<String>,
}

impl fmt::Display for RegionDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, ".region {}", self.name)?;
        writeln!(f, ".sup_init {}", self.spec.sup_init)?;
        for ((c, p), events) in &self.spec.classes {
            writeln!(f, "class {c} {p} : {}", events.join(" "))?;
        }
        let table = |f: &mut fmt::Formatter<'_>, head: &str, v: &Option<Vec<(String, u64)>>| -> fmt::Result {
            if let Some(v) = v {
                write!(f, "{head}")?;
                for (k, x) in v {
                    write!(f, " {k}={x}")?;
                }
                writeln!(f)?;
            }
            Ok(())
        };
        table(f, ".support", &self.support)?;
        table(f, ".con", &self.con)?;
        table(f, ".pro", &self.pro)?;
        if !self.claims.is_empty() {
            writeln!(f, ".claims {}", self.claims.join(" "))?;
        }
        Ok(())
    }
}

impl RegionDoc {
    /// Expanded serialization of a concrete region: class form plus support and weight tables.
    pub fn from_region(name: impl Into<String>, ts: &TransitionSystem, r: &Region) -> Self {
        let nonzero = |v: &[u64]| {
            ts.events()
                .filter(|e| v[e.0] > 0)
                .map(|e| (ts.event_name(e).to_string(), v[e.0]))
                .collect::<Vec<_>>()
        };
        RegionDoc {
            name: name.into(),
            spec: r.to_spec(ts),
            support: Some(ts.states().map(|s| (ts.state_name(s).to_string(), r.sup[s.0])).collect()),
            con: Some(nonzero(&r.con)),
            pro: Some(nonzero(&r.pro)),
            claims: Vec::new(),
        }
    }

    /// Expands the spec and checks any expanded tables against it.
    pub fn resolve(&self, ts: &TransitionSystem) -> Result<Region, RegionError> {
        let r = expand_region_spec(ts, &self.spec)?;
        if let Some(support) = &self.support {
            for (s, v) in support {
                let id = ts.state_id(s).ok_or_else(|| RegionError::Mismatch(format!("unknown state {s}")))?;
                if r.sup[id.0] != *v {
                    return Err(RegionError::Mismatch(format!(
                        "{}: listed support {s}={v}, expansion gives {}",
                        self.name, r.sup[id.0]
                    )));
                }
            }
        }
        for (table, values, what) in [(&self.con, &r.con, "con"), (&self.pro, &r.pro, "pro")] {
            if let Some(table) = table {
                let mut listed = vec![0u64; ts.num_events()];
                for (e, w) in table {
                    let id = ts.event_id(e).ok_or_else(|| RegionError::UnknownEvent(e.clone()))?;
                    listed[id.0] = *w;
                }
                if &listed != values {
                    return Err(RegionError::Mismatch(format!("{}: {what} table disagrees with its classes", self.name)));
                }
            }
        }
        Ok(r)
    }
}

/// Serializes region blocks, one after the other.
pub fn regions_to_text(docs: &[RegionDoc]) -> String {
    docs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Parses a region file: one or more blocks, each starting with `.region <name>`.
pub fn parse_regions(text: &str) -> Result<Vec<RegionDoc>, ParseError> {
    let mut docs: Vec<RegionDoc> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = tokens.split_first() else { continue };
        if head == ".region" {
            if rest.len() != 1 {
                return Err(ParseError::syntax(line, ".region takes exactly one name"));
            }
            docs.push(RegionDoc { name: rest[0].to_string(), ..Default::default() });
            continue;
        }
        let doc = docs
            .last_mut()
            .ok_or_else(|| ParseError::syntax(line, "expected .region before region content"))?;
        let number = |s: &str| s.parse::<u64>().map_err(|_| ParseError::syntax(line, format!("expected a natural number, found `{s}`")));
        let pairs = |rest: &[&str]| -> Result<Vec<(String, u64)>, ParseError> {
            rest.iter()
                .map(|kv| {
                    let (k, v) = kv.split_once('=').ok_or_else(|| ParseError::syntax(line, format!("expected id=value, found `{kv}`")))?;
                    Ok((k.to_string(), number(v)?))
                })
                .collect()
        };
        match head {
            ".sup_init" => {
                if rest.len() != 1 {
                    return Err(ParseError::syntax(line, ".sup_init takes one value"));
                }
                doc.spec.sup_init = number(rest[0])?;
            }
            "class" => {
                if rest.len() < 3 || rest[2] != ":" {
                    return Err(ParseError::syntax(line, "expected `class <c> <p> : events...`"));
                }
                let (c, p) = (number(rest[0])?, number(rest[1])?);
                let events: Vec<String> = rest[3..].iter().map(|s| s.to_string()).collect();
                doc.spec = std::mem::take(&mut doc.spec).class(c, p, events);
            }
            ".support" => doc.support = Some(pairs(rest)?),
            ".con" => doc.con = Some(pairs(rest)?),
            ".pro" => doc.pro = Some(pairs(rest)?),
            ".claims" => doc.claims.extend(rest.iter().map(|s| s.to_string())),
            other => return Err(ParseError::syntax(line, format!("unknown region directive {other}"))),
        }
    }
    if docs.is_empty() {
        return Err(ParseError::syntax(0, "no .region block found"));
    }
    Ok(docs)
}
