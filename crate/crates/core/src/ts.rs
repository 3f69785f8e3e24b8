//! Finite, initialized, deterministic labeled transition systems.
//!
//! States and events are addressed by dense indices ([`StateId`], [`EventId`]) whose
//! order is the order of first declaration. That order is the canonical ordering used
//! by every downstream algorithm.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventId(pub usize);

/// A labeled edge `src --event--> tgt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: StateId,
    pub event: EventId,
    pub tgt: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Two edges leave the same state with the same label.
    Nondeterministic { state: String, event: String },
    /// State not reachable from the initial state.
    NotInitialized { state: String },
    /// An edge, or the initial state, refers to an index that does not exist.
    UndeclaredId { what: String },
    /// A state or event identifier was declared twice.
    DuplicateId { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Nondeterministic { state, event } => {
                write!(f, "nondeterministic: event {event} leaves state {state} more than once")
            }
            Violation::NotInitialized { state } => {
                write!(f, "not initialized: state {state} is unreachable from the initial state")
            }
            Violation::UndeclaredId { what } => write!(f, "undeclared identifier: {what}"),
            Violation::DuplicateId { id } => write!(f, "duplicate identifier: {id}"),
        }
    }
}

/// Bijection between the states of two transition systems, indexed by source state.
pub type StateMap = Vec<StateId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    name: Option<String>,
    states: Vec<String>,
    events: Vec<String>,
    initial: StateId,
    edges: Vec<Edge>,
    // succ[s * |E| + e]; first edge wins when the input is nondeterministic.
    succ: Vec<Option<StateId>>,
}

impl TransitionSystem {
    /// Builds a transition system and rejects it unless every invariant holds.
    pub fn new(
        name: Option<String>,
        states: Vec<String>,
        events: Vec<String>,
        initial: StateId,
        edges: Vec<Edge>,
    ) -> Result<Self, Vec<Violation>> {
        let ts = Self::unchecked(name, states, events, initial, edges);
        let report = ts.validate();
        if report.is_empty() {
            Ok(ts)
        } else {
            Err(report)
        }
    }

    /// Builds a transition system without checking its invariants.
    ///
    /// Algorithms in this crate assume a valid system; call [`validate`](Self::validate)
    /// before handing the result to them.
    pub fn unchecked(
        name: Option<String>,
        states: Vec<String>,
        events: Vec<String>,
        initial: StateId,
        edges: Vec<Edge>,
    ) -> Self {
        let (ns, ne) = (states.len(), events.len());
        let mut succ = vec![None; ns * ne];
        for e in &edges {
            if e.src.0 < ns && e.event.0 < ne && e.tgt.0 < ns {
                let slot = &mut succ[e.src.0 * ne + e.event.0];
                if slot.is_none() {
                    *slot = Some(e.tgt);
                }
            }
        }
        TransitionSystem { name, states, events, initial, edges, succ }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn events(&self) -> impl ExactSizeIterator<Item = EventId> {
        (0..self.events.len()).map(EventId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.events[e.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn event_names(&self) -> &[String] {
        &self.events
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.events.iter().position(|e| e == name).map(EventId)
    }

    /// The partial transition function.
    pub fn delta(&self, s: StateId, e: EventId) -> Option<StateId> {
        self.succ[s.0 * self.events.len() + e.0]
    }

    /// Outgoing `(event, target)` pairs of `s` in canonical event order.
    pub fn outgoing(&self, s: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        let ne = self.events.len();
        self.succ[s.0 * ne..(s.0 + 1) * ne]
            .iter()
            .enumerate()
            .filter_map(|(e, t)| t.map(|t| (EventId(e), t)))
    }

    /// Lists every invariant violation. Empty means the system is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let (ns, ne) = (self.states.len(), self.events.len());

        let mut seen = HashMap::new();
        for id in self.states.iter().chain(self.events.iter()) {
            if seen.insert(id.as_str(), ()).is_some() {
                report.push(Violation::DuplicateId { id: id.clone() });
            }
        }
        if self.initial.0 >= ns {
            report.push(Violation::UndeclaredId { what: format!("initial state #{}", self.initial.0) });
        }
        let mut used = vec![false; ns * ne];
        for e in &self.edges {
            if e.src.0 >= ns || e.tgt.0 >= ns || e.event.0 >= ne {
                report.push(Violation::UndeclaredId {
                    what: format!("edge ({}, {}, {})", e.src.0, e.event.0, e.tgt.0),
                });
                continue;
            }
            let slot = &mut used[e.src.0 * ne + e.event.0];
            if *slot {
                report.push(Violation::Nondeterministic {
                    state: self.states[e.src.0].clone(),
                    event: self.events[e.event.0].clone(),
                });
            }
            *slot = true;
        }
        if self.initial.0 < ns {
            let reached = self.reachable_from(self.initial);
            for (s, r) in reached.iter().enumerate() {
                if !r {
                    report.push(Violation::NotInitialized { state: self.states[s].clone() });
                }
            }
        }
        report
    }

    fn reachable_from(&self, start: StateId) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([start]);
        seen[start.0] = true;
        while let Some(s) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.src == s) {
                if e.tgt.0 < seen.len() && !seen[e.tgt.0] {
                    seen[e.tgt.0] = true;
                    queue.push_back(e.tgt);
                }
            }
        }
        seen
    }

    /// Serializes into the line-oriented `.ts` format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!(".ts {name}\n"));
        }
        out.push_str(".states");
        for s in &self.states {
            out.push(' ');
            out.push_str(s);
        }
        out.push_str("\n.events");
        for e in &self.events {
            out.push(' ');
            out.push_str(e);
        }
        out.push_str(&format!("\n.initial {}\n.edges\n", self.states[self.initial.0]));
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                self.states[e.src.0], self.events[e.event.0], self.states[e.tgt.0]
            ));
        }
        out
    }
}

/// Parses the `.ts` text format.
///
/// ```text
/// .ts A3
/// .states s0 s1 s2 s3
/// .events a b
/// .initial s0
/// .edges
/// s0 a s1
/// ```
pub fn parse_ts(text: &str) -> Result<TransitionSystem, ParseError> {
    let mut name = None;
    let mut states: Vec<String> = Vec::new();
    let mut events: Vec<String> = Vec::new();
    let mut state_ix: HashMap<String, usize> = HashMap::new();
    let mut event_ix: HashMap<String, usize> = HashMap::new();
    let mut state_line: Vec<usize> = Vec::new();
    let mut initial: Option<(String, usize)> = None;
    let mut raw_edges: Vec<(usize, [String; 3])> = Vec::new();
    let mut in_edges = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();
        match head {
            ".ts" => {
                in_edges = false;
                if rest.len() > 1 {
                    return Err(ParseError::syntax(line, "expected at most one name after .ts"));
                }
                name = rest.first().map(|s| s.to_string());
            }
            ".states" => {
                in_edges = false;
                for s in rest {
                    if state_ix.contains_key(s) || event_ix.contains_key(s) {
                        return Err(ParseError::syntax(line, format!("identifier {s} declared twice")));
                    }
                    state_ix.insert(s.to_string(), states.len());
                    states.push(s.to_string());
                    state_line.push(line);
                }
            }
            ".events" => {
                in_edges = false;
                for e in rest {
                    if state_ix.contains_key(e) || event_ix.contains_key(e) {
                        return Err(ParseError::syntax(line, format!("identifier {e} declared twice")));
                    }
                    event_ix.insert(e.to_string(), events.len());
                    events.push(e.to_string());
                }
            }
            ".initial" => {
                in_edges = false;
                if rest.len() != 1 {
                    return Err(ParseError::syntax(line, ".initial takes exactly one state"));
                }
                if initial.is_some() {
                    return Err(ParseError::syntax(line, "initial state given twice"));
                }
                initial = Some((rest[0].to_string(), line));
            }
            ".edges" => {
                if !rest.is_empty() {
                    return Err(ParseError::syntax(line, ".edges takes no arguments"));
                }
                in_edges = true;
            }
            d if d.starts_with('.') => {
                return Err(ParseError::syntax(line, format!("unknown directive {d}")));
            }
            src => {
                if !in_edges {
                    return Err(ParseError::syntax(line, "edge triple outside of .edges section"));
                }
                if rest.len() != 2 {
                    return Err(ParseError::syntax(line, "expected `source event target`"));
                }
                raw_edges.push((line, [src.to_string(), rest[0].to_string(), rest[1].to_string()]));
            }
        }
    }

    if states.is_empty() {
        return Err(ParseError::syntax(0, "no states declared"));
    }
    let (init_name, init_line) = initial.ok_or_else(|| ParseError::syntax(0, "missing .initial"))?;
    let init = *state_ix
        .get(&init_name)
        .ok_or_else(|| ParseError::undeclared(init_line, &init_name))?;

    let mut edges = Vec::with_capacity(raw_edges.len());
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (line, [s, e, t]) in &raw_edges {
        let src = *state_ix.get(s).ok_or_else(|| ParseError::undeclared(*line, s))?;
        let ev = *event_ix.get(e).ok_or_else(|| ParseError::undeclared(*line, e))?;
        let tgt = *state_ix.get(t).ok_or_else(|| ParseError::undeclared(*line, t))?;
        if let Some(prev) = seen.insert((src, ev), *line) {
            return Err(ParseError::Nondeterministic {
                line: *line,
                state: s.clone(),
                event: e.clone(),
                first_line: prev,
            });
        }
        edges.push(Edge { src: StateId(src), event: EventId(ev), tgt: StateId(tgt) });
    }

    let ts = TransitionSystem::unchecked(name, states, events, StateId(init), edges);
    let reached = ts.reachable_from(ts.initial);
    if let Some(s) = reached.iter().position(|r| !r) {
        return Err(ParseError::Unreachable { line: state_line[s], state: ts.states[s].clone() });
    }
    Ok(ts)
}

/// Why two transition systems are not isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Discrepancy {
    EventSetsDiffer,
    StateCountMismatch { left: usize, right: usize },
    /// `event` leaves `left_state` in the left system but not the matched right state.
    MissingEdge { left_state: String, right_state: String, event: String },
    /// `event` leaves `right_state` in the right system but not the matched left state.
    ExtraEdge { left_state: String, right_state: String, event: String },
    /// The same right state would be matched with two left states, or vice versa.
    Conflict { left_state: String, right_state: String, event: String },
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discrepancy::EventSetsDiffer => write!(f, "event sets differ"),
            Discrepancy::StateCountMismatch { left, right } => {
                write!(f, "state-count mismatch: {left} vs {right}")
            }
            Discrepancy::MissingEdge { left_state, right_state, event } => write!(
                f,
                "missing edge: {left_state} enables {event} but its image {right_state} does not"
            ),
            Discrepancy::ExtraEdge { left_state, right_state, event } => write!(
                f,
                "extra edge: {right_state} enables {event} but its preimage {left_state} does not"
            ),
            Discrepancy::Conflict { left_state, right_state, event } => write!(
                f,
                "conflicting match after {event}: {left_state} cannot correspond to {right_state}"
            ),
        }
    }
}

/// Synchronized traversal from the two initial states; returns the unique isomorphism
/// or the first discrepancy encountered.
pub fn isomorphism(a: &TransitionSystem, b: &TransitionSystem) -> Result<StateMap, Discrepancy> {
    if a.events.len() != b.events.len() {
        return Err(Discrepancy::EventSetsDiffer);
    }
    // Event of `a` -> event of `b` with the same identifier.
    let mut ev_map = Vec::with_capacity(a.events.len());
    for name in &a.events {
        match b.event_id(name) {
            Some(e) => ev_map.push(e),
            None => return Err(Discrepancy::EventSetsDiffer),
        }
    }
    if a.num_states() != b.num_states() {
        return Err(Discrepancy::StateCountMismatch { left: a.num_states(), right: b.num_states() });
    }

    let mut fwd: Vec<Option<StateId>> = vec![None; a.num_states()];
    let mut bwd: Vec<Option<StateId>> = vec![None; b.num_states()];
    fwd[a.initial.0] = Some(b.initial);
    bwd[b.initial.0] = Some(a.initial);
    let mut queue = VecDeque::from([(a.initial, b.initial)]);
    while let Some((sa, sb)) = queue.pop_front() {
        for ea in a.events() {
            let eb = ev_map[ea.0];
            match (a.delta(sa, ea), b.delta(sb, eb)) {
                (None, None) => {}
                (Some(_), None) => {
                    return Err(Discrepancy::MissingEdge {
                        left_state: a.states[sa.0].clone(),
                        right_state: b.states[sb.0].clone(),
                        event: a.events[ea.0].clone(),
                    })
                }
                (None, Some(_)) => {
                    return Err(Discrepancy::ExtraEdge {
                        left_state: a.states[sa.0].clone(),
                        right_state: b.states[sb.0].clone(),
                        event: a.events[ea.0].clone(),
                    })
                }
                (Some(ta), Some(tb)) => match (fwd[ta.0], bwd[tb.0]) {
                    (None, None) => {
                        fwd[ta.0] = Some(tb);
                        bwd[tb.0] = Some(ta);
                        queue.push_back((ta, tb));
                    }
                    (Some(x), Some(y)) if x == tb && y == ta => {}
                    _ => {
                        return Err(Discrepancy::Conflict {
                            left_state: a.states[ta.0].clone(),
                            right_state: b.states[tb.0].clone(),
                            event: a.events[ea.0].clone(),
                        })
                    }
                },
            }
        }
    }
    // Both systems are initialized and of equal size, so every state is matched here.
    fwd.into_iter()
        .map(|t| t.ok_or(Discrepancy::StateCountMismatch { left: a.num_states(), right: b.num_states() }))
        .collect()
}

/// The isomorphism from `a` onto `b`, if there is one.
pub fn isomorphic(a: &TransitionSystem, b: &TransitionSystem) -> Option<StateMap> {
    isomorphism(a, b).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const A1: &str = ".ts A1\n.states s0 s1 s2\n.events a b\n.initial s0\n.edges\ns0 a s0\ns0 b s1\ns1 a s2\n";
    pub(crate) const A2: &str = ".ts A2\n.states s0 s1\n.events a\n.initial s0\n.edges\ns0 a s1\ns1 a s0\n";
    pub(crate) const A3: &str = ".ts A3\n.states s0 s1 s2 s3\n.events a b\n.initial s0\n.edges\ns0 a s1\ns1 b s3\ns0 b s2\ns2 a s3\n";

    #[test]
    fn parses_figure_one_systems() {
        let a3 = parse_ts(A3).unwrap();
        assert_eq!((a3.num_states(), a3.num_events(), a3.num_edges()), (4, 2, 4));
        assert_eq!(a3.name(), Some("A3"));
        let a1 = parse_ts(A1).unwrap();
        assert_eq!(a1.num_edges(), 3);
        assert_eq!(a1.delta(StateId(0), EventId(0)), Some(StateId(0)));
    }

    #[test]
    fn smallest_system() {
        let ts = parse_ts(".states q\n.initial q\n").unwrap();
        assert_eq!((ts.num_states(), ts.num_events(), ts.num_edges()), (1, 0, 0));
        assert!(ts.validate().is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dup = ".states s0 s1 s2\n.events a\n.initial s0\n.edges\ns0 a s1\ns0 a s2\n";
        match parse_ts(dup) {
            Err(ParseError::Nondeterministic { line, first_line, .. }) => {
                assert_eq!((line, first_line), (6, 5))
            }
            other => panic!("{other:?}"),
        }
        let unreachable = ".states s0\n.states x\n.events a\n.initial s0\n.edges\ns0 a s0\n";
        assert!(matches!(parse_ts(unreachable), Err(ParseError::Unreachable { line: 2, .. })));
        let undeclared = ".states s0\n.events a\n.initial s0\n.edges\ns0 b s0\n";
        assert!(matches!(parse_ts(undeclared), Err(ParseError::Undeclared { line: 5, .. })));
        let syntax = ".states s0\n.initial s0\n.edges\ns0 a\n";
        assert!(matches!(parse_ts(syntax), Err(ParseError::Syntax { line: 4, .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\n.states s0 s1 # two states\n\n.events a\n.initial s0\n.edges\ns0 a s1 # edge\n";
        assert_eq!(parse_ts(text).unwrap().num_edges(), 1);
    }

    #[test]
    fn validate_reports_each_violation() {
        let a3 = parse_ts(A3).unwrap();
        assert!(a3.validate().is_empty());

        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let isolated = TransitionSystem::unchecked(
            None,
            names(&["s0", "s1", "x"]),
            names(&["a"]),
            StateId(0),
            vec![Edge { src: StateId(0), event: EventId(0), tgt: StateId(1) }],
        );
        assert_eq!(isolated.validate(), vec![Violation::NotInitialized { state: "x".into() }]);

        let nondet = TransitionSystem::unchecked(
            None,
            names(&["s0", "s1", "s2"]),
            names(&["a", "b"]),
            StateId(0),
            vec![
                Edge { src: StateId(0), event: EventId(0), tgt: StateId(1) },
                Edge { src: StateId(0), event: EventId(0), tgt: StateId(2) },
                Edge { src: StateId(0), event: EventId(1), tgt: StateId(2) },
            ],
        );
        assert_eq!(
            nondet.validate(),
            vec![Violation::Nondeterministic { state: "s0".into(), event: "a".into() }]
        );
    }

    #[test]
    fn self_isomorphism_is_identity() {
        let a3 = parse_ts(A3).unwrap();
        let map = isomorphic(&a3, &a3).unwrap();
        assert_eq!(map, (0..4).map(StateId).collect::<Vec<_>>());
    }

    #[test]
    fn size_mismatch_is_not_isomorphic() {
        let a1 = parse_ts(A1).unwrap();
        let a2 = parse_ts(A2).unwrap();
        assert!(isomorphic(&a1, &a2).is_none());
    }

    #[test]
    fn renamed_copy_is_isomorphic() {
        let a3 = parse_ts(A3).unwrap();
        let renamed = parse_ts(
            ".states q3 q2 q1 q0\n.events b a\n.initial q0\n.edges\nq0 a q1\nq1 b q3\nq0 b q2\nq2 a q3\n",
        )
        .unwrap();
        let map = isomorphic(&a3, &renamed).unwrap();
        let names: Vec<_> = map.iter().map(|s| renamed.state_name(*s)).collect();
        assert_eq!(names, ["q0", "q1", "q2", "q3"]);
    }

    #[test]
    fn serialization_round_trips() {
        for text in [A1, A2, A3] {
            let ts = parse_ts(text).unwrap();
            assert_eq!(ts.to_text(), text);
            assert_eq!(parse_ts(&ts.to_text()).unwrap(), ts);
        }
    }
}
