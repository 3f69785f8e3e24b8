//! Transition systems from the two hardness reductions, with their witness regions.

mod hs;
mod instance;
mod pure;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{InstanceError, ParseError, RegionError};
use crate::region::{parse_regions, regions_to_text, Region, RegionDoc, RegionSpec, SeparationAtom};
use crate::ts::{parse_ts, Edge, EventId, StateId, TransitionSystem};

pub use hs::{build_hs_gadget, hs_expected_counts, HS_LAMBDA_THRESHOLDS};
pub use instance::{parse_1in3, parse_hs, solve_1in3_brute, solve_hs_brute, HSInstance, OneInThreeInstance};
pub use pure::{build_1in3_gadget, one_in_three_expected_counts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    HittingSet,
    OneInThree,
}

impl GadgetKind {
    pub fn tag(self) -> &'static str {
        match self {
            GadgetKind::HittingSet => "hs",
            GadgetKind::OneInThree => "1in3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetSource {
    HittingSet(HSInstance),
    OneInThree(OneInThreeInstance),
}

impl GadgetSource {
    fn to_text(&self) -> String {
        match self {
            GadgetSource::HittingSet(i) => i.to_text(),
            GadgetSource::OneInThree(i) => i.to_text(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetOutput {
    pub kind: GadgetKind,
    pub source: GadgetSource,
    pub ts: TransitionSystem,
    pub rho: usize,
    pub kappa: usize,
    pub pure: bool,
    pub distinguished_atom: SeparationAtom,
    pub witnesses: Vec<RegionDoc>,
    /// Hitting set or model the witnesses were instantiated with.
    pub solution: Option<Vec<usize>>,
    pub warnings: Vec<String>,
}

/// Incremental construction of a gadget system by state and event names.
#[derive(Default)]
pub(crate) struct Builder {
    states: Vec<String>,
    events: Vec<String>,
    state_ix: HashMap<String, usize>,
    event_ix: HashMap<String, usize>,
    edges: Vec<Edge>,
}

impl Builder {
    pub(crate) fn state(&mut self, name: String) {
        let id = self.states.len();
        assert!(self.state_ix.insert(name.clone(), id).is_none(), "state {name} declared twice");
        self.states.push(name);
    }

    pub(crate) fn event(&mut self, name: String) {
        let id = self.events.len();
        assert!(self.event_ix.insert(name.clone(), id).is_none(), "event {name} declared twice");
        self.events.push(name);
    }

    pub(crate) fn edge(&mut self, s: &str, e: &str, t: &str) {
        self.edges.push(Edge {
            src: StateId(self.state_ix[s]),
            event: EventId(self.event_ix[e]),
            tgt: StateId(self.state_ix[t]),
        });
    }

    pub(crate) fn finish(self, name: &str, initial: &str) -> TransitionSystem {
        let init = StateId(self.state_ix[initial]);
        TransitionSystem::new(Some(name.to_string()), self.states, self.events, init, self.edges)
            .unwrap_or_else(|v| panic!("gadget construction produced an invalid system: {v:?}"))
    }
}

/// Region spec under construction. Events and states the instance does not have are
/// dropped, so formulas indexed past the ends of a family stay well-defined.
pub(crate) struct Witness<'a> {
    ts: &'a TransitionSystem,
    doc: RegionDoc,
}

impl<'a> Witness<'a> {
    pub(crate) fn new(ts: &'a TransitionSystem, name: &str, sup_init: u64) -> Self {
        Witness { ts, doc: RegionDoc { name: name.to_string(), spec: RegionSpec::new(sup_init), ..Default::default() } }
    }

    pub(crate) fn class<I: IntoIterator<Item = String>>(mut self, c: u64, p: u64, events: I) -> Self {
        let present: Vec<String> = events.into_iter().filter(|e| self.ts.event_id(e).is_some()).collect();
        if !present.is_empty() {
            self.doc.spec = std::mem::take(&mut self.doc.spec).class(c, p, present);
        }
        self
    }

    pub(crate) fn essa(mut self, e: &str, s: &str) -> Self {
        if self.ts.event_id(e).is_some() && self.ts.state_id(s).is_some() {
            self.doc.claims.push(format!("essa:{e},{s}"));
        }
        self
    }

    pub(crate) fn essa_if_disabled(self, e: &str, s: &str) -> Self {
        match (self.ts.event_id(e), self.ts.state_id(s)) {
            (Some(ev), Some(st)) if self.ts.delta(st, ev).is_none() => self.essa(e, s),
            _ => self,
        }
    }

    pub(crate) fn ssa(mut self, a: &str, b: &str) -> Self {
        if a != b && self.ts.state_id(a).is_some() && self.ts.state_id(b).is_some() {
            self.doc.claims.push(format!("ssa:{a},{b}"));
        }
        self
    }

    pub(crate) fn build(self) -> RegionDoc {
        self.doc
    }
}

/// Outcome of checking one witness spec against its gadget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub name: String,
    /// `None` when the spec expands to a region.
    pub incoherence: Option<String>,
    pub environment: Option<(usize, usize)>,
    pub within_bounds: bool,
    pub pure: bool,
    pub solved: Vec<String>,
    pub unsolved: Vec<String>,
    /// Claimed pairs that are not separation atoms of the gadget.
    pub not_atoms: Vec<String>,
}

impl WitnessReport {
    pub fn coherent(&self) -> bool {
        self.incoherence.is_none()
    }

    /// Coherent, within bounds, pure where required, and solving every claimed atom.
    pub fn fully_confirmed(&self, needs_pure: bool) -> bool {
        self.coherent() && self.within_bounds && (!needs_pure || self.pure) && self.unsolved.is_empty() && self.not_atoms.is_empty()
    }
}

pub fn check_witness(ts: &TransitionSystem, rho: usize, kappa: usize, doc: &RegionDoc) -> WitnessReport {
    let mut report = WitnessReport {
        name: doc.name.clone(),
        incoherence: None,
        environment: None,
        within_bounds: false,
        pure: false,
        solved: Vec::new(),
        unsolved: Vec::new(),
        not_atoms: Vec::new(),
    };
    let region: Result<Region, RegionError> = doc.resolve(ts);
    let region = match region {
        Ok(r) => r,
        Err(e) => {
            report.incoherence = Some(e.to_string());
            return report;
        }
    };
    let (pre, post) = region.environment();
    report.environment = Some((pre, post));
    report.within_bounds = pre <= rho && post <= kappa;
    report.pure = region.is_pure();
    for claim in &doc.claims {
        match SeparationAtom::parse(claim, ts) {
            Ok(atom) if region.solves(&atom) => report.solved.push(claim.clone()),
            Ok(_) => report.unsolved.push(claim.clone()),
            Err(_) => report.not_atoms.push(claim.clone()),
        }
    }
    report
}

impl GadgetOutput {
    pub fn check_witnesses(&self) -> Vec<WitnessReport> {
        self.witnesses.iter().map(|w| check_witness(&self.ts, self.rho, self.kappa, w)).collect()
    }

    pub fn witness(&self, name: &str) -> Option<&RegionDoc> {
        self.witnesses.iter().find(|w| w.name == name)
    }

    /// Gadget file: the system in the transition-system format, preceded by `#@`
    /// metadata lines that the system parser skips as comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ts = &self.ts;
        let _ = writeln!(out, "#@ gadget {}", self.kind.tag());
        for line in self.source.to_text().lines() {
            let _ = writeln!(out, "#@ instance {line}");
        }
        let _ = writeln!(out, "#@ rho {}", self.rho);
        let _ = writeln!(out, "#@ kappa {}", self.kappa);
        let _ = writeln!(out, "#@ pure {}", self.pure);
        let _ = writeln!(out, "#@ atom {}", self.distinguished_atom.spec(ts));
        if self.kind == GadgetKind::HittingSet {
            let (low, high) = HS_LAMBDA_THRESHOLDS;
            let _ = writeln!(out, "#@ lambda-thresholds {low} {high}");
        }
        if let Some(sol) = &self.solution {
            let _ = writeln!(out, "#@ solution {}", sol.iter().map(|v| format!("X{v}")).collect::<Vec<_>>().join(" "));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "#@ warning {w}");
        }
        for line in regions_to_text(&self.witnesses).lines().filter(|l| !l.is_empty()) {
            let _ = writeln!(out, "#@ region {line}");
        }
        out.push_str(&ts.to_text());
        out
    }
}

/// Reads a gadget file written by [`GadgetOutput::to_text`].
pub fn parse_gadget(text: &str) -> Result<GadgetOutput, InstanceError> {
    let ts = parse_ts(text)?;
    let mut kind = None;
    let mut instance = String::new();
    let mut regions = String::new();
    let (mut rho, mut kappa, mut pure, mut atom, mut solution) = (None, None, None, None, None);
    let mut warnings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let Some(meta) = raw.strip_prefix("#@ ") else { continue };
        let line = i + 1;
        let (key, value) = meta.split_once(' ').unwrap_or((meta, ""));
        let number = |v: &str| v.trim().parse::<usize>().map_err(|_| ParseError::syntax(line, format!("bad number `{v}`")));
        match key {
            "gadget" => {
                kind = Some(match value.trim() {
                    "hs" => GadgetKind::HittingSet,
                    "1in3" => GadgetKind::OneInThree,
                    other => return Err(ParseError::syntax(line, format!("unknown gadget kind {other}")).into()),
                })
            }
            "instance" => {
                instance.push_str(value);
                instance.push('\n');
            }
            "region" => {
                regions.push_str(value);
                regions.push('\n');
            }
            "rho" => rho = Some(number(value)?),
            "kappa" => kappa = Some(number(value)?),
            "pure" => pure = Some(value.trim() == "true"),
            "atom" => atom = Some(SeparationAtom::parse(value.trim(), &ts).map_err(|e| ParseError::syntax(line, e))?),
            "solution" => {
                solution = Some(
                    value
                        .split_whitespace()
                        .map(|v| v.strip_prefix('X').ok_or(()).and_then(|d| d.parse().map_err(|_| ())))
                        .collect::<Result<Vec<usize>, ()>>()
                        .map_err(|_| ParseError::syntax(line, "bad solution list"))?,
                )
            }
            "warning" => warnings.push(value.to_string()),
            "lambda-thresholds" => {}
            other => return Err(ParseError::syntax(line, format!("unknown gadget metadata `{other}`")).into()),
        }
    }
    let missing = |what: &str| InstanceError::Precondition(format!("gadget file lacks `#@ {what}`"));
    let kind = kind.ok_or_else(|| missing("gadget"))?;
    let source = match kind {
        GadgetKind::HittingSet => GadgetSource::HittingSet(parse_hs(&instance)?),
        GadgetKind::OneInThree => GadgetSource::OneInThree(parse_1in3(&instance)?),
    };
    let witnesses = if regions.is_empty() { Vec::new() } else { parse_regions(&regions)? };
    Ok(GadgetOutput {
        kind,
        source,
        ts,
        rho: rho.ok_or_else(|| missing("rho"))?,
        kappa: kappa.ok_or_else(|| missing("kappa"))?,
        pure: pure.ok_or_else(|| missing("pure"))?,
        distinguished_atom: atom.ok_or_else(|| missing("atom"))?,
        witnesses,
        solution,
        warnings,
    })
}

/// Reads off `{X | pro(X) > 0}` from a restricted region solving the distinguished atom
/// and checks that it solves the source instance: a hitting set of size at most
/// `lambda`, or a one-in-three model of size `m/3`.
pub fn extract_hitting_set(gadget: &GadgetOutput, r: &Region) -> Result<Vec<usize>, InstanceError> {
    let ts = &gadget.ts;
    r.check(ts).map_err(|e| InstanceError::Precondition(format!("not a region of the gadget: {e}")))?;
    let (pre, post) = r.environment();
    if pre > gadget.rho || post > gadget.kappa {
        return Err(InstanceError::Precondition(format!(
            "environment ({pre},{post}) exceeds the bounds ({},{})",
            gadget.rho, gadget.kappa
        )));
    }
    if gadget.pure && !r.is_pure() {
        return Err(InstanceError::Precondition("the region is not pure".into()));
    }
    if !r.solves(&gadget.distinguished_atom) {
        return Err(InstanceError::Precondition(format!(
            "the region does not solve {}",
            gadget.distinguished_atom.label(ts)
        )));
    }
    let universe = match &gadget.source {
        GadgetSource::HittingSet(i) => i.n,
        GadgetSource::OneInThree(i) => i.m(),
    };
    let chosen: Vec<usize> = (0..universe)
        .filter(|v| ts.event_id(&format!("X{v}")).is_some_and(|e| r.pro[e.0] > 0))
        .collect();
    match &gadget.source {
        GadgetSource::HittingSet(inst) => {
            if !inst.is_hitting_set(&chosen) || chosen.len() > inst.lambda {
                return Err(InstanceError::ReductionFailure(format!(
                    "{chosen:?} is not a hitting set of size at most {}",
                    inst.lambda
                )));
            }
        }
        GadgetSource::OneInThree(inst) => {
            if !inst.is_model(&chosen) || chosen.len() != inst.m() / 3 {
                return Err(InstanceError::ReductionFailure(format!("{chosen:?} is not a one-in-three model")));
            }
        }
    }
    Ok(chosen)
}
