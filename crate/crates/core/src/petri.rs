//! Place/transition nets: firing, reachability graphs and comparison with a system.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, PetriError};
use crate::ts::{isomorphism, Discrepancy, Edge, EventId, StateId, StateMap, TransitionSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Place {
    pub name: String,
    pub initial: u64,
    /// `f(p, t)` per transition.
    pub consume: Vec<u64>,
    /// `f(t, p)` per transition.
    pub produce: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetriNet {
    pub name: Option<String>,
    pub transitions: Vec<String>,
    pub places: Vec<Place>,
}

/// Token counts in place order.
pub type Marking = Vec<u64>;

impl PetriNet {
    pub fn initial_marking(&self) -> Marking {
        self.places.iter().map(|p| p.initial).collect()
    }

    pub fn transition_id(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t == name)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// Fires transition index `t`; `None` when some place holds fewer tokens than `t` consumes.
pub fn fire(net: &PetriNet, m: &[u64], t: usize) -> Option<Marking> {
    net.places
        .iter()
        .zip(m)
        .map(|(p, &tokens)| tokens.checked_sub(p.consume[t]).map(|left| left + p.produce[t]))
        .collect()
}

pub fn fire_named(net: &PetriNet, m: &[u64], t: &str) -> Result<Option<Marking>, PetriError> {
    let id = net.transition_id(t).ok_or_else(|| PetriError::UnknownTransition(t.to_string()))?;
    Ok(fire(net, m, id))
}

/// State name of a marking: concatenated digits when every count is below 10, otherwise
/// dot-separated counts; `-` for the empty marking.
pub fn marking_name(m: &[u64]) -> String {
    if m.is_empty() {
        "-".to_string()
    } else if m.iter().all(|v| *v < 10) {
        m.iter().map(|v| v.to_string()).collect()
    } else {
        m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Breadth-first reachability graph, expanding transitions in declaration order.
/// Fails once more than `state_cap` markings have been generated.
pub fn reachability_graph(net: &PetriNet, state_cap: usize) -> Result<TransitionSystem, PetriError> {
    let m0 = net.initial_marking();
    let mut index: HashMap<Marking, usize> = HashMap::from([(m0.clone(), 0)]);
    let mut markings = vec![m0];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    if state_cap == 0 {
        return Err(PetriError::CapExceeded { cap: 0 });
    }
    while let Some(s) = queue.pop_front() {
        for t in 0..net.transitions.len() {
            let Some(next) = fire(net, &markings[s], t) else { continue };
            let tgt = match index.get(&next) {
                Some(&i) => i,
                None => {
                    if markings.len() == state_cap {
                        return Err(PetriError::CapExceeded { cap: state_cap });
                    }
                    let i = markings.len();
                    index.insert(next.clone(), i);
                    markings.push(next);
                    queue.push_back(i);
                    i
                }
            };
            edges.push(Edge { src: StateId(s), event: EventId(t), tgt: StateId(tgt) });
        }
    }
    let states = markings.iter().map(|m| marking_name(m)).collect();
    Ok(TransitionSystem::unchecked(net.name.clone(), states, net.transitions.clone(), StateId(0), edges))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyFailure {
    CapExceeded { cap: usize },
    Discrepancy(Discrepancy),
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::CapExceeded { cap } => write!(f, "the net has more than {cap} reachable markings"),
            VerifyFailure::Discrepancy(d) => d.fmt(f),
        }
    }
}

/// Like [`verify`], but explains a negative answer.
pub fn verify_detailed(ts: &TransitionSystem, net: &PetriNet) -> Result<Result<StateMap, VerifyFailure>, PetriError> {
    if ts.event_names() != net.transitions.as_slice() {
        let a: HashSet<&String> = ts.event_names().iter().collect();
        let b: HashSet<&String> = net.transitions.iter().collect();
        if a != b || ts.event_names().len() != net.transitions.len() {
            return Err(PetriError::EventMismatch { ts: ts.event_names().join(" "), net: net.transitions.join(" ") });
        }
    }
    let cap = ts.num_states() + 1;
    let graph = match reachability_graph(net, cap) {
        Ok(g) => g,
        Err(_) => return Ok(Err(VerifyFailure::CapExceeded { cap })),
    };
    Ok(isomorphism(ts, &graph).map_err(VerifyFailure::Discrepancy))
}

/// The isomorphism from `ts` onto the reachability graph of `net`, if there is one.
/// The graph is built with cap `|S| + 1`.
pub fn verify(ts: &TransitionSystem, net: &PetriNet) -> Result<Option<StateMap>, PetriError> {
    Ok(verify_detailed(ts, net)?.ok())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetEnvironment {
    /// `(|preset|, |postset|)` per place.
    pub per_place: Vec<(usize, usize)>,
    pub max: (usize, usize),
}

pub fn net_environment(net: &PetriNet) -> NetEnvironment {
    let per_place: Vec<(usize, usize)> = net
        .places
        .iter()
        .map(|p| (p.produce.iter().filter(|w| **w > 0).count(), p.consume.iter().filter(|w| **w > 0).count()))
        .collect();
    let max = per_place.iter().fold((0, 0), |(a, b), (x, y)| (a.max(*x), b.max(*y)));
    NetEnvironment { per_place, max }
}

impl fmt::Display for PetriNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, ".net {name}")?;
        }
        writeln!(f, ".transitions {}", self.transitions.join(" "))?;
        for p in &self.places {
            writeln!(f, ".place {} init={}", p.name, p.initial)?;
            for (label, weights) in [("cons", &p.consume), ("prod", &p.produce)] {
                let items: Vec<String> = weights
                    .iter()
                    .zip(&self.transitions)
                    .filter(|(w, _)| **w > 0)
                    .map(|(w, t)| format!("{t}={w}"))
                    .collect();
                if !items.is_empty() {
                    writeln!(f, "  {label} {}", items.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

pub fn parse_net(text: &str) -> Result<PetriNet, ParseError> {
    let mut net = PetriNet { name: None, transitions: Vec::new(), places: Vec::new() };
    let mut have_transitions = false;
    let mut place_names = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().expect("nonempty line");
        let rest: Vec<&str> = words.collect();
        match head {
            ".net" => {
                if rest.len() != 1 {
                    return Err(ParseError::syntax(line_no, ".net takes exactly one name"));
                }
                net.name = Some(rest[0].to_string());
            }
            ".transitions" => {
                if have_transitions {
                    return Err(ParseError::syntax(line_no, "duplicate .transitions"));
                }
                have_transitions = true;
                let mut seen = HashSet::new();
                for t in &rest {
                    if !seen.insert(*t) {
                        return Err(ParseError::syntax(line_no, format!("transition {t} declared twice")));
                    }
                }
                net.transitions = rest.iter().map(|t| t.to_string()).collect();
            }
            ".place" => {
                if !have_transitions {
                    return Err(ParseError::syntax(line_no, ".place before .transitions"));
                }
                let (name, init) = match rest.as_slice() {
                    [name] => (*name, 0),
                    [name, init] => {
                        let v = init
                            .strip_prefix("init=")
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| ParseError::syntax(line_no, format!("expected init=<N>, got {init}")))?;
                        (*name, v)
                    }
                    _ => return Err(ParseError::syntax(line_no, "expected .place <name> init=<N>")),
                };
                if net.transitions.iter().any(|t| t == name) || !place_names.insert(name.to_string()) {
                    return Err(ParseError::syntax(line_no, format!("place name {name} is already in use")));
                }
                let n = net.transitions.len();
                net.places.push(Place { name: name.to_string(), initial: init, consume: vec![0; n], produce: vec![0; n] });
            }
            "cons" | "prod" => {
                let transitions = &net.transitions;
                let place = net
                    .places
                    .last_mut()
                    .ok_or_else(|| ParseError::syntax(line_no, format!("{head} outside of a .place block")))?;
                let weights = if head == "cons" { &mut place.consume } else { &mut place.produce };
                for item in rest {
                    let (t, w) = item
                        .split_once('=')
                        .ok_or_else(|| ParseError::syntax(line_no, format!("expected <transition>=<weight>, got {item}")))?;
                    let id = transitions.iter().position(|x| x == t).ok_or_else(|| ParseError::undeclared(line_no, t))?;
                    let w: u64 = w.parse().map_err(|_| ParseError::syntax(line_no, format!("bad weight {w}")))?;
                    if weights[id] != 0 {
                        return Err(ParseError::syntax(line_no, format!("weight for {t} given twice")));
                    }
                    weights[id] = w;
                }
            }
            other => return Err(ParseError::syntax(line_no, format!("unknown directive {other}"))),
        }
    }
    if !have_transitions {
        return Err(ParseError::syntax(text.lines().count().max(1), "missing .transitions"));
    }
    Ok(net)
}
