//! Region synthesis under environment restrictions.

mod selection;
mod system;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linear::{rescale_to_integers, LinearSystem, Rational};
use crate::petri::{self, PetriNet, Place};
use crate::region::{atoms, Region, SeparationAtom};
use crate::tree::SpanningTree;
use crate::ts::{StateMap, TransitionSystem};

pub use selection::{selections, Combinations, SupportSelection};
pub use system::{build_system, con_var, pro_var, region_constraints, restrict_system};

/// Limit on the preset (`rho`) or postset (`kappa`) size of every region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    At(usize),
    Unbounded,
}

impl Bound {
    pub fn resolve(self, num_events: usize) -> usize {
        match self {
            Bound::At(k) => k.min(num_events),
            Bound::Unbounded => num_events,
        }
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "unbounded" {
            return Ok(Bound::Unbounded);
        }
        s.parse().map(Bound::At).map_err(|_| format!("expected a nonnegative integer or `unbounded`, got `{s}`"))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::At(k) => write!(f, "{k}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Environment restriction in force, with both limits already resolved against `|E|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionBounds {
    pub rho: usize,
    pub kappa: usize,
    pub pure: bool,
}

impl RestrictionBounds {
    pub fn new(ts: &TransitionSystem, rho: Bound, kappa: Bound, pure: bool) -> Self {
        let n = ts.num_events();
        RestrictionBounds { rho: rho.resolve(n), kappa: kappa.resolve(n), pure }
    }

    pub fn unbounded(ts: &TransitionSystem) -> Self {
        Self::new(ts, Bound::Unbounded, Bound::Unbounded, false)
    }

    pub fn admits(&self, r: &Region) -> bool {
        let (pre, post) = r.environment();
        pre <= self.rho && post <= self.kappa && (!self.pure || r.is_pure())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Heuristic,
    Auto,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "heuristic" => Ok(Strategy::Heuristic),
            "auto" => Ok(Strategy::Auto),
            _ => Err(format!("unknown strategy `{s}` (exhaustive, heuristic or auto)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Heuristic => "heuristic",
            Strategy::Auto => "auto",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub strategy: Strategy,
    /// Maximum number of selections the exhaustive search tries per atom.
    pub selection_cap: Option<usize>,
    /// Re-solves the heuristic may spend on one branch.
    pub heuristic_budget: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { strategy: Strategy::Auto, selection_cap: None, heuristic_budget: 16 }
    }
}

impl SolverConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SolverConfig { strategy, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomOutcome {
    Solved(Region),
    /// No region within the bounds solves the atom.
    Unsolvable,
    /// The search gave up (heuristic budget or selection cap) without an answer.
    Unknown,
}

impl AtomOutcome {
    pub fn region(&self) -> Option<&Region> {
        match self {
            AtomOutcome::Solved(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomStats {
    pub systems_solved: usize,
    pub selections_tried: usize,
}

/// Per-system solving context, shared by all atoms.
pub struct Solver<'a> {
    ts: &'a TransitionSystem,
    tree: &'a SpanningTree,
    base: LinearSystem,
    bounds: RestrictionBounds,
    config: SolverConfig,
}

impl<'a> Solver<'a> {
    pub fn new(ts: &'a TransitionSystem, tree: &'a SpanningTree, bounds: RestrictionBounds, config: SolverConfig) -> Self {
        Solver { ts, tree, base: region_constraints(ts, tree), bounds, config }
    }

    pub fn solve(&self, atom: &SeparationAtom) -> (AtomOutcome, AtomStats) {
        let branches = system::separation_systems(self.ts, self.tree, &self.base, atom);
        let mut stats = AtomStats::default();
        let outcome = match self.config.strategy {
            Strategy::Exhaustive => self.exhaustive(&branches, &mut stats),
            Strategy::Heuristic => self.heuristic(&branches, &mut stats),
            Strategy::Auto => match self.heuristic(&branches, &mut stats) {
                AtomOutcome::Unknown => self.exhaustive(&branches, &mut stats),
                decided => decided,
            },
        };
        if let AtomOutcome::Solved(r) = &outcome {
            debug_assert!(r.solves(atom) && self.bounds.admits(r));
        }
        (outcome, stats)
    }

    fn feasible(&self, sys: &LinearSystem, stats: &mut AtomStats) -> Option<Vec<Rational>> {
        stats.systems_solved += 1;
        sys.feasible()
    }

    fn region_from_point(&self, x: &[Rational]) -> Region {
        let n = self.ts.num_events();
        let ints: Vec<u64> = rescale_to_integers(x)
            .iter()
            .map(|v| v.to_u64().expect("rescaled region values are nonnegative and fit in 64 bits"))
            .collect();
        let r = Region::from_initial(self.ts, ints[0], ints[1..1 + n].to_vec(), ints[1 + n..].to_vec())
            .expect("a feasible point is a region");
        r.check(self.ts).expect("a feasible point is a region");
        r
    }

    fn unconstrained(&self) -> bool {
        let n = self.ts.num_events();
        !self.bounds.pure && self.bounds.rho >= n && self.bounds.kappa >= n
    }

    fn exhaustive(&self, branches: &[LinearSystem], stats: &mut AtomStats) -> AtomOutcome {
        // Every restricted system is a tightening of the unrestricted one.
        let mut relaxed = Vec::with_capacity(branches.len());
        for sys in branches {
            if let Some(x) = self.feasible(sys, stats) {
                relaxed.push(x);
            }
        }
        if relaxed.is_empty() {
            return AtomOutcome::Unsolvable;
        }
        if self.unconstrained() {
            return AtomOutcome::Solved(self.region_from_point(&relaxed[0]));
        }
        let n = self.ts.num_events();
        for (tried, sel) in selections(n, self.bounds.rho, self.bounds.kappa, self.bounds.pure).enumerate() {
            if self.config.selection_cap.is_some_and(|cap| tried >= cap) {
                return AtomOutcome::Unknown;
            }
            stats.selections_tried += 1;
            for sys in branches {
                if let Some(x) = self.feasible(&restrict_system(sys, &sel), stats) {
                    return AtomOutcome::Solved(self.region_from_point(&x));
                }
            }
        }
        AtomOutcome::Unsolvable
    }

    fn heuristic(&self, branches: &[LinearSystem], stats: &mut AtomStats) -> AtomOutcome {
        let mut any_feasible = false;
        for sys in branches {
            match self.heuristic_branch(sys, stats) {
                Some(Ok(r)) => return AtomOutcome::Solved(r),
                Some(Err(())) => any_feasible = true,
                None => {}
            }
        }
        if any_feasible {
            AtomOutcome::Unknown
        } else {
            AtomOutcome::Unsolvable
        }
    }

    /// `None` if the unrestricted branch is infeasible, `Some(Err(()))` if the greedy
    /// tightening ran out of budget or into infeasibility.
    fn heuristic_branch(&self, sys: &LinearSystem, stats: &mut AtomStats) -> Option<Result<Region, ()>> {
        let n = self.ts.num_events();
        let mut zero_pro = vec![false; n];
        let mut zero_con = vec![false; n];
        for attempt in 0..=self.config.heuristic_budget {
            let x = match self.feasible(&system::force_zero(sys, &zero_pro, &zero_con), stats) {
                Some(x) => x,
                None if attempt == 0 => return None,
                None => return Some(Err(())),
            };
            let r = self.region_from_point(&x);
            if self.bounds.admits(&r) {
                return Some(Ok(r));
            }
            if self.bounds.pure {
                for e in 0..n {
                    if r.con[e] > 0 && r.pro[e] > 0 {
                        if r.pro[e] <= r.con[e] {
                            zero_pro[e] = true;
                        } else {
                            zero_con[e] = true;
                        }
                    }
                }
            }
            trim_smallest(&r.pro, self.bounds.rho, &mut zero_pro);
            trim_smallest(&r.con, self.bounds.kappa, &mut zero_con);
        }
        Some(Err(()))
    }
}

/// Marks the smallest nonzero entries of `values` as forced to zero until at most
/// `limit` nonzero entries remain unforced.
fn trim_smallest(values: &[u64], limit: usize, forced: &mut [bool]) {
    let mut live: Vec<(u64, usize)> =
        values.iter().enumerate().filter(|(e, v)| **v > 0 && !forced[*e]).map(|(e, v)| (*v, e)).collect();
    if live.len() <= limit {
        return;
    }
    live.sort();
    for (_, e) in &live[..live.len() - limit] {
        forced[*e] = true;
    }
}

/// Searches for a region within `bounds` that solves `atom`.
pub fn solve_atom(
    ts: &TransitionSystem,
    tree: &SpanningTree,
    atom: &SeparationAtom,
    bounds: RestrictionBounds,
    config: SolverConfig,
) -> AtomOutcome {
    Solver::new(ts, tree, bounds, config).solve(atom).0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisOptions {
    pub config: SolverConfig,
    /// Worker threads; 1 solves atoms sequentially.
    pub jobs: usize,
    /// Keep going after the first unsolvable atom and report all of them.
    pub scan_all: bool,
    pub verify: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { config: SolverConfig::default(), jobs: 1, scan_all: false, verify: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `origins[i]` is the atom `regions[i]` was computed for.
    Solved { regions: Vec<Region>, origins: Vec<SeparationAtom>, net: PetriNet },
    /// `witness` is the first unsolvable atom; `failing` lists every one found.
    Unsolvable { witness: SeparationAtom, failing: Vec<SeparationAtom> },
    Unknown { atom: SeparationAtom },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisStats {
    pub atoms_total: usize,
    pub atoms_reused: usize,
    pub atoms_lp_solved: usize,
    pub systems_solved: usize,
    pub selections_tried: usize,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub outcome: Outcome,
    pub stats: SynthesisStats,
    /// Present when verification was requested and the outcome is `Solved`.
    pub verification: Option<Option<StateMap>>,
}

/// Searches for an admissible set of regions within `bounds` and the net it defines.
pub fn synthesize(ts: &TransitionSystem, bounds: RestrictionBounds, options: &SynthesisOptions) -> SynthesisResult {
    let start = Instant::now();
    let tree = SpanningTree::new(ts);
    let solver = Solver::new(ts, &tree, bounds, options.config);
    let all = atoms(ts);
    let mut stats = SynthesisStats { atoms_total: all.len(), ..Default::default() };

    let mut regions: Vec<Region> = Vec::new();
    let mut origins = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut failing = Vec::new();
    let mut unknown = None;

    let pool = (options.jobs > 1).then(|| {
        rayon::ThreadPoolBuilder::new().num_threads(options.jobs).build().expect("thread pool")
    });
    let window = if pool.is_some() { options.jobs * 2 } else { 1 };

    let mut next = 0;
    'outer: while next < all.len() {
        let mut end = next;
        let mut pending = Vec::new();
        while end < all.len() && pending.len() < window {
            if !regions.iter().any(|r| r.solves(&all[end])) {
                pending.push(end);
            }
            end += 1;
        }
        let solve = |&k: &usize| (k, solver.solve(&all[k]));
        let solved: Vec<(usize, (AtomOutcome, AtomStats))> = match &pool {
            Some(pool) => pool.install(|| pending.par_iter().map(solve).collect()),
            None => pending.iter().map(solve).collect(),
        };
        let mut solved = solved.into_iter().peekable();
        for (k, &atom) in all.iter().enumerate().take(end).skip(next) {
            let fresh = match solved.peek() {
                Some((j, _)) if *j == k => solved.next().map(|(_, o)| o),
                _ => None,
            };
            if regions.iter().any(|r| r.solves(&atom)) {
                stats.atoms_reused += 1;
                if let Some((_, s)) = fresh {
                    accumulate(&mut stats, s);
                }
                continue;
            }
            let (outcome, s) = fresh.expect("atoms unsolved at merge time were pending");
            accumulate(&mut stats, s);
            stats.atoms_lp_solved += 1;
            match outcome {
                AtomOutcome::Solved(r) => {
                    if seen.insert(r.key(ts)) {
                        regions.push(r);
                        origins.push(atom);
                    }
                }
                AtomOutcome::Unsolvable => {
                    failing.push(atom);
                    if !options.scan_all {
                        break 'outer;
                    }
                }
                AtomOutcome::Unknown => {
                    unknown.get_or_insert(atom);
                }
            }
        }
        next = end;
    }

    let outcome = if let Some(&witness) = failing.first() {
        Outcome::Unsolvable { witness, failing }
    } else if let Some(atom) = unknown {
        Outcome::Unknown { atom }
    } else {
        let net = build_net(ts, &regions);
        Outcome::Solved { regions, origins, net }
    };
    let verification = match (&outcome, options.verify) {
        (Outcome::Solved { net, .. }, true) => Some(petri::verify(ts, net).unwrap_or(None)),
        _ => None,
    };
    stats.wall_time = start.elapsed();
    SynthesisResult { outcome, stats, verification }
}

fn accumulate(stats: &mut SynthesisStats, s: AtomStats) {
    stats.systems_solved += s.systems_solved;
    stats.selections_tried += s.selections_tried;
}

/// The net with one place `p<i>` per region: `M0 = sup(ι)`, `f(p, e) = con(e)`, `f(e, p) = pro(e)`.
pub fn build_net(ts: &TransitionSystem, regions: &[Region]) -> PetriNet {
    let places = regions
        .iter()
        .enumerate()
        .map(|(i, r)| Place {
            name: format!("p{i}"),
            initial: r.sup[ts.initial().0],
            consume: r.con.clone(),
            produce: r.pro.clone(),
        })
        .collect();
    PetriNet { name: ts.name().map(str::to_string), transitions: ts.event_names().to_vec(), places }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::{parse_ts, StateId};

    const A1: &str = ".states s0 s1 s2\n.events a b\n.initial s0\n.edges\ns0 a s0\ns0 b s1\ns1 a s2\n";
    const A2: &str = ".states s0 s1\n.events a\n.initial s0\n.edges\ns0 a s1\ns1 a s0\n";
    const A3: &str = ".states s0 s1 s2 s3\n.events a b\n.initial s0\n.edges\ns0 a s1\ns1 b s3\ns0 b s2\ns2 a s3\n";

    fn exhaustive() -> SolverConfig {
        SolverConfig::with_strategy(Strategy::Exhaustive)
    }

    #[test]
    fn a3_atom_with_tight_bounds_gives_r1() {
        let ts = parse_ts(A3).unwrap();
        let tree = SpanningTree::new(&ts);
        let a = ts.event_id("a").unwrap();
        let bounds = RestrictionBounds::new(&ts, Bound::At(0), Bound::At(1), false);
        let r = solve_atom(&ts, &tree, &SeparationAtom::Essa(a, StateId(1)), bounds, exhaustive());
        let r = r.region().unwrap();
        assert_eq!((r.sup.clone(), r.con.clone(), r.pro.clone()), (vec![1, 0, 1, 0], vec![1, 0], vec![0, 0]));
    }

    #[test]
    fn unsolvable_atoms_are_reported() {
        let a2 = parse_ts(A2).unwrap();
        let tree = SpanningTree::new(&a2);
        let b = RestrictionBounds::unbounded(&a2);
        assert_eq!(solve_atom(&a2, &tree, &SeparationAtom::ssa(StateId(0), StateId(1)), b, exhaustive()), AtomOutcome::Unsolvable);

        let a1 = parse_ts(A1).unwrap();
        let tree = SpanningTree::new(&a1);
        let a = a1.event_id("a").unwrap();
        let b = RestrictionBounds::unbounded(&a1);
        for strategy in [Strategy::Exhaustive, Strategy::Heuristic, Strategy::Auto] {
            let got = solve_atom(&a1, &tree, &SeparationAtom::Essa(a, StateId(2)), b, SolverConfig::with_strategy(strategy));
            assert_eq!(got, AtomOutcome::Unsolvable);
        }
    }

    #[test]
    fn synthesis_outcomes_for_small_examples() {
        let a3 = parse_ts(A3).unwrap();
        let options = SynthesisOptions { verify: true, ..Default::default() };
        let res = synthesize(&a3, RestrictionBounds::new(&a3, Bound::At(0), Bound::At(1), false), &options);
        match &res.outcome {
            Outcome::Solved { regions, net, .. } => {
                assert_eq!(regions.len(), 2);
                assert_eq!(petri::net_environment(net).max, (0, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(res.verification, Some(Some(_))));

        let a2 = parse_ts(A2).unwrap();
        let res = synthesize(&a2, RestrictionBounds::unbounded(&a2), &SynthesisOptions::default());
        assert_eq!(res.outcome, Outcome::Unsolvable { witness: SeparationAtom::ssa(StateId(0), StateId(1)), failing: vec![SeparationAtom::ssa(StateId(0), StateId(1))] });

        let a1 = parse_ts(A1).unwrap();
        let options = SynthesisOptions { scan_all: true, ..Default::default() };
        match synthesize(&a1, RestrictionBounds::unbounded(&a1), &options).outcome {
            Outcome::Unsolvable { failing, .. } => {
                let labels: Vec<String> = failing.iter().map(|a| a.label(&a1)).collect();
                assert_eq!(labels, vec!["(s1,s2)", "(a,s2)"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parallel_runs_match_sequential_runs() {
        let a3 = parse_ts(A3).unwrap();
        for (rho, kappa) in [(0, 1), (1, 1), (2, 2)] {
            let bounds = RestrictionBounds::new(&a3, Bound::At(rho), Bound::At(kappa), false);
            let seq = synthesize(&a3, bounds, &SynthesisOptions::default());
            let par = synthesize(&a3, bounds, &SynthesisOptions { jobs: 3, ..Default::default() });
            assert_eq!(seq.outcome, par.outcome);
        }
    }

    #[test]
    fn empty_region_list_gives_placeless_net() {
        let a3 = parse_ts(A3).unwrap();
        let net = build_net(&a3, &[]);
        assert!(net.places.is_empty());
        assert_eq!(net.transitions, vec!["a", "b"]);
    }

    #[test]
    fn bound_parsing() {
        assert_eq!("unbounded".parse::<Bound>(), Ok(Bound::Unbounded));
        assert_eq!("3".parse::<Bound>(), Ok(Bound::At(3)));
        assert!("-1".parse::<Bound>().is_err());
        assert_eq!(Bound::At(9).resolve(4), 4);
    }
}
