use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use ersynth_core::gadgets::{build_1in3_gadget, build_hs_gadget, parse_1in3, parse_gadget, parse_hs, GadgetOutput};
use ersynth_core::{
    atoms, brute_force_region, build_system, for_each_solving_region, net_environment, parse_net, parse_regions, parse_ts,
    reachability_graph, regions_to_text, solved_atoms_report, synthesize, verify_detailed, Bound, OracleBounds, Outcome,
    PetriError, PetriNet, Region, RegionDoc, RestrictionBounds, SeparationAtom, SolverConfig, SpanningTree, Strategy,
    SynthesisOptions, TransitionSystem,
};
use serde_json::{json, Map, Value};

use crate::report::{Report, Verdict};

pub type Outcome_ = (Report, Verdict);

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_ts(path: &Path) -> Result<TransitionSystem> {
    parse_ts(&read(path)?).with_context(|| format!("invalid transition system {}", path.display()))
}

fn load_atom(spec: &str, ts: &TransitionSystem) -> Result<SeparationAtom> {
    SeparationAtom::parse(spec, ts).map_err(|e| anyhow!(e))
}

fn kind(atom: &SeparationAtom) -> &'static str {
    if atom.is_ssa() {
        "SSA"
    } else {
        "ESSA"
    }
}

fn weights(ts: &TransitionSystem, v: &[u64]) -> Value {
    let mut m = Map::new();
    for e in ts.events().filter(|e| v[e.0] > 0) {
        m.insert(ts.event_name(e).to_string(), v[e.0].into());
    }
    Value::Object(m)
}

fn region_fields(ts: &TransitionSystem, r: &Region) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("initial".into(), r.sup[ts.initial().0].into());
    m.insert("support".into(), Value::Object(ts.states().map(|s| (ts.state_name(s).to_string(), r.sup[s.0].into())).collect()));
    m.insert("consume".into(), weights(ts, &r.con));
    m.insert("produce".into(), weights(ts, &r.pro));
    let (pre, post) = r.environment();
    m.insert("environment".into(), json!([pre, post]));
    m.insert("pure".into(), r.is_pure().into());
    m
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Transition system file.
    pub ts: PathBuf,
    /// Maximum preset size per place (N or `unbounded`).
    #[arg(long, default_value = "unbounded")]
    pub rho: Bound,
    /// Maximum postset size per place (N or `unbounded`).
    #[arg(long, default_value = "unbounded")]
    pub kappa: Bound,
    /// Only pure places.
    #[arg(long)]
    pub pure: bool,
    #[arg(long, default_value = "auto")]
    pub strategy: Strategy,
    /// Check the synthesized net's reachability graph against the input.
    #[arg(long)]
    pub verify: bool,
    /// Where to write the net.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the regions.
    #[arg(long)]
    pub regions_out: Option<PathBuf>,
    /// Worker threads for atom solving.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Report every unsolvable atom instead of stopping at the first.
    #[arg(long)]
    pub all_failures: bool,
    /// Give up (unknown) after this many support selections for one atom.
    #[arg(long)]
    pub selection_cap: Option<usize>,
    /// Rounds of the heuristic before it reports unknown.
    #[arg(long)]
    pub budget: Option<usize>,
}

pub fn synth(args: &SynthArgs) -> Result<Outcome_> {
    let ts = load_ts(&args.ts)?;
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let bounds = RestrictionBounds::new(&ts, args.rho, args.kappa, args.pure);
    let mut config = SolverConfig::with_strategy(args.strategy);
    config.selection_cap = args.selection_cap;
    if let Some(b) = args.budget {
        config.heuristic_budget = b;
    }
    let options = SynthesisOptions { config, jobs: args.jobs, scan_all: args.all_failures, verify: args.verify };
    let result = synthesize(&ts, bounds, &options);

    let mut report = Report::new("");
    report
        .set("system", args.ts.display().to_string())
        .set("states", ts.num_states())
        .set("events", ts.num_events())
        .set("rho", bounds.rho)
        .set("kappa", bounds.kappa)
        .set("pure", bounds.pure)
        .set("strategy", args.strategy.to_string());
    let verdict = match &result.outcome {
        Outcome::Solved { regions, origins, net } => {
            let env = net_environment(net);
            let places: Vec<Value> = regions
                .iter()
                .zip(origins)
                .zip(&net.places)
                .map(|((r, origin), p)| {
                    let mut m = Map::new();
                    m.insert("name".into(), p.name.clone().into());
                    m.insert("atom".into(), origin.label(&ts).into());
                    m.extend(region_fields(&ts, r));
                    Value::Object(m)
                })
                .collect();
            let mut summary = format!("solved: {} places, max environment ({},{})", regions.len(), env.max.0, env.max.1);
            report.set("outcome", "solved").set("places", places).set("environment_max", json!([env.max.0, env.max.1]));
            let mut verdict = Verdict::Yes;
            if let Some(verification) = &result.verification {
                match verification {
                    Some(map) => {
                        let graph = reachability_graph(net, ts.num_states() + 1)?;
                        let phi: Map<String, Value> =
                            ts.states().map(|s| (ts.state_name(s).to_string(), graph.state_name(map[s.0]).into())).collect();
                        report.set("verified", "isomorphic").set("state_map", Value::Object(phi));
                        summary.push_str("; verified: isomorphic");
                    }
                    None => {
                        report.set("verified", "not isomorphic");
                        summary.push_str("; verified: NOT isomorphic");
                        verdict = Verdict::No;
                    }
                }
            }
            if let Some(path) = &args.out {
                write(path, &net.to_text())?;
                report.set("net_file", path.display().to_string());
            }
            if let Some(path) = &args.regions_out {
                let docs: Vec<RegionDoc> = regions
                    .iter()
                    .zip(&net.places)
                    .zip(origins)
                    .map(|((r, p), origin)| RegionDoc { claims: vec![origin.spec(&ts)], ..RegionDoc::from_region(&p.name, &ts, r) })
                    .collect();
                write(path, &regions_to_text(&docs))?;
                report.set("regions_file", path.display().to_string());
            }
            report.set_summary(summary);
            verdict
        }
        Outcome::Unsolvable { witness, failing } => {
            report
                .set("outcome", "unsolvable")
                .set("witness", witness.label(&ts))
                .set("witness_kind", kind(witness))
                .set("failing", failing.iter().map(|a| format!("{} {}", kind(a), a.label(&ts))).collect::<Vec<_>>());
            report.set_summary(format!("unsolvable: {} {} has no admissible region", kind(witness), witness.label(&ts)));
            Verdict::No
        }
        Outcome::Unknown { atom } => {
            report.set("outcome", "unknown").set("atom", atom.label(&ts)).set("atom_kind", kind(atom));
            report.set_summary(format!("unknown: search limit reached at {} {}", kind(atom), atom.label(&ts)));
            Verdict::Unknown
        }
    };
    let s = &result.stats;
    report.set(
        "stats",
        json!({
            "atoms_total": s.atoms_total,
            "atoms_reused": s.atoms_reused,
            "atoms_lp_solved": s.atoms_lp_solved,
            "systems_solved": s.systems_solved,
            "selections_tried": s.selections_tried,
            "wall_time_ms": s.wall_time.as_secs_f64() * 1e3,
        }),
    );
    Ok((report, verdict))
}

pub fn verify(ts_path: &Path, net_path: &Path) -> Result<Outcome_> {
    let ts = load_ts(ts_path)?;
    let net: PetriNet = parse_net(&read(net_path)?).with_context(|| format!("invalid net {}", net_path.display()))?;
    let checked = match verify_detailed(&ts, &net) {
        Err(e @ PetriError::EventMismatch { .. }) => bail!(e),
        other => other?,
    };
    let mut report = Report::new("");
    report.set("system", ts_path.display().to_string()).set("net", net_path.display().to_string());
    match checked {
        Ok(map) => {
            let graph = reachability_graph(&net, ts.num_states() + 1)?;
            let phi: Map<String, Value> =
                ts.states().map(|s| (ts.state_name(s).to_string(), graph.state_name(map[s.0]).into())).collect();
            report.set_summary(format!("isomorphic: {} states", ts.num_states()));
            report.set("isomorphic", true).set("state_map", Value::Object(phi));
            Ok((report, Verdict::Yes))
        }
        Err(failure) => {
            report.set_summary(format!("not isomorphic: {failure}"));
            report.set("isomorphic", false).set("discrepancy", failure.to_string());
            Ok((report, Verdict::No))
        }
    }
}

pub fn atoms_cmd(ts_path: &Path, dump_systems: bool) -> Result<Outcome_> {
    let ts = load_ts(ts_path)?;
    let all = atoms(&ts);
    let ssa = all.iter().filter(|a| a.is_ssa()).count();
    let mut report = Report::new(format!("{ssa} SSA, {} ESSA", all.len() - ssa));
    report
        .set("system", ts_path.display().to_string())
        .set("ssa", ssa)
        .set("essa", all.len() - ssa)
        .set("atoms", all.iter().map(|a| a.spec(&ts)).collect::<Vec<_>>());
    if dump_systems {
        let tree = SpanningTree::new(&ts);
        let systems: Vec<Value> = all
            .iter()
            .map(|a| {
                let branches: Vec<Value> = build_system(&ts, &tree, a)
                    .iter()
                    .map(|sys| sys.to_string().lines().map(str::to_string).collect::<Vec<_>>().into())
                    .collect();
                json!({ "atom": a.spec(&ts), "branches": branches })
            })
            .collect();
        report.set("systems", systems);
    }
    Ok((report, Verdict::Yes))
}

pub fn check_region(ts_path: &Path, regions_path: &Path, atom: Option<&str>) -> Result<Outcome_> {
    let ts = load_ts(ts_path)?;
    let docs = parse_regions(&read(regions_path)?).with_context(|| format!("invalid region file {}", regions_path.display()))?;
    if docs.is_empty() {
        bail!("{} contains no regions", regions_path.display());
    }
    let atom = atom.map(|a| load_atom(a, &ts)).transpose()?;
    // claims are checked as atoms of this system; malformed ones are input errors
    for doc in &docs {
        for claim in &doc.claims {
            load_atom(claim, &ts).with_context(|| format!("region {}", doc.name))?;
        }
    }
    let mut all_ok = true;
    let mut entries = Vec::new();
    let mut summaries = Vec::new();
    for doc in &docs {
        let mut m = Map::new();
        m.insert("name".into(), doc.name.clone().into());
        let summary = match doc.resolve(&ts).and_then(|r| r.check(&ts).map(|_| r)) {
            Ok(r) => {
                let solves = solved_atoms_report(&ts, &r);
                let (pre, post) = r.environment();
                let mut line = format!(
                    "valid; {}; env ({pre},{post}); solves {}",
                    if r.is_pure() { "pure" } else { "impure" },
                    if solves.is_empty() { "nothing".to_string() } else { solves.join(",") }
                );
                m.insert("valid".into(), true.into());
                m.extend(region_fields(&ts, &r));
                m.insert("solves".into(), solves.into());
                if let Some(a) = &atom {
                    let hit = r.solves(a);
                    all_ok &= hit;
                    m.insert("atom".into(), a.label(&ts).into());
                    m.insert("atom_solved".into(), hit.into());
                    line.push_str(&format!("; {} {}", a.label(&ts), if hit { "solved" } else { "NOT solved" }));
                }
                if !doc.claims.is_empty() {
                    let unsolved: Vec<String> = doc
                        .claims
                        .iter()
                        .filter(|c| !r.solves(&load_atom(c, &ts).expect("checked above")))
                        .cloned()
                        .collect();
                    all_ok &= unsolved.is_empty();
                    line.push_str(&format!("; claims {}/{} solved", doc.claims.len() - unsolved.len(), doc.claims.len()));
                    m.insert("claims_unsolved".into(), unsolved.into());
                }
                line
            }
            Err(e) => {
                all_ok = false;
                m.insert("valid".into(), false.into());
                m.insert("error".into(), e.to_string().into());
                format!("invalid: {e}")
            }
        };
        m.insert("summary".into(), summary.clone().into());
        summaries.push(summary);
        entries.push(Value::Object(m));
    }
    let summary = if docs.len() == 1 {
        summaries.remove(0)
    } else {
        format!("{} regions: {}", docs.len(), if all_ok { "all valid" } else { "some checks failed" })
    };
    let mut report = Report::new(summary);
    report.set("system", ts_path.display().to_string()).set("regions", entries);
    Ok((report, if all_ok { Verdict::Yes } else { Verdict::No }))
}

#[derive(Args, Debug)]
pub struct BruteArgs {
    pub ts: PathBuf,
    /// Largest value tried for supports and weights.
    #[arg(long, default_value_t = 2)]
    pub bound: u64,
    #[arg(long, default_value = "unbounded")]
    pub rho: Bound,
    #[arg(long, default_value = "unbounded")]
    pub kappa: Bound,
    #[arg(long)]
    pub pure: bool,
    /// Atom to solve (`ssa:s,t` or `essa:e,s`); every atom when omitted.
    #[arg(long)]
    pub atom: Option<String>,
}

pub fn brute(args: &BruteArgs) -> Result<Outcome_> {
    let ts = load_ts(&args.ts)?;
    let ne = ts.num_events();
    let ob = OracleBounds { value_bound: args.bound, rho: args.rho.resolve(ne), kappa: args.kappa.resolve(ne), pure: args.pure };
    let mut report = Report::new("");
    report
        .set("system", args.ts.display().to_string())
        .set("bound", args.bound)
        .set("rho", ob.rho)
        .set("kappa", ob.kappa)
        .set("pure", ob.pure);
    let verdict = if let Some(spec) = &args.atom {
        let atom = load_atom(spec, &ts)?;
        report.set("atom", atom.label(&ts));
        match brute_force_region(&ts, atom, ob) {
            Some(r) => {
                report.set_summary(format!("found: region solving {} with values up to {}", atom.label(&ts), args.bound));
                report.set("found", true).set("region", Value::Object(region_fields(&ts, &r)));
                Verdict::Yes
            }
            None => {
                report.set_summary(format!("none: no region solves {} with values up to {}", atom.label(&ts), args.bound));
                report.set("found", false);
                Verdict::No
            }
        }
    } else {
        let all = atoms(&ts);
        let mut unsolved = Vec::new();
        for atom in &all {
            let mut found = false;
            for_each_solving_region(&ts, *atom, ob, |_| {
                found = true;
                ControlFlow::Break(())
            });
            if !found {
                unsolved.push(atom.spec(&ts));
            }
        }
        report.set_summary(format!(
            "{}/{} atoms solvable with values up to {}",
            all.len() - unsolved.len(),
            all.len(),
            args.bound
        ));
        report.set("atoms", all.len()).set("unsolved", unsolved.clone());
        if unsolved.is_empty() {
            Verdict::Yes
        } else {
            Verdict::No
        }
    };
    Ok((report, verdict))
}

fn gadget_report(g: &GadgetOutput, out: &Path) -> Result<Outcome_> {
    write(out, &g.to_text())?;
    let mut report = Report::new(format!(
        "gadget: {} states, {} events, {} edges; bounds ({},{})",
        g.ts.num_states(),
        g.ts.num_events(),
        g.ts.num_edges(),
        g.rho,
        g.kappa
    ));
    report
        .set("file", out.display().to_string())
        .set("kind", g.kind.tag())
        .set("states", g.ts.num_states())
        .set("events", g.ts.num_events())
        .set("edges", g.ts.num_edges())
        .set("rho", g.rho)
        .set("kappa", g.kappa)
        .set("pure", g.pure)
        .set("atom", g.distinguished_atom.label(&g.ts))
        .set("solution", g.solution.clone().map_or(Value::Null, |s| s.into()))
        .set("witnesses", g.witnesses.len())
        .set("warnings", g.warnings.clone());
    Ok((report, Verdict::Yes))
}

pub fn gen_hs(instance: &Path, out: &Path) -> Result<Outcome_> {
    let inst = parse_hs(&read(instance)?).with_context(|| format!("invalid instance {}", instance.display()))?;
    gadget_report(&build_hs_gadget(&inst)?, out)
}

pub fn gen_1in3(instance: &Path, out: &Path) -> Result<Outcome_> {
    let inst = parse_1in3(&read(instance)?).with_context(|| format!("invalid instance {}", instance.display()))?;
    gadget_report(&build_1in3_gadget(&inst), out)
}

pub fn witnesses(gadget: &Path) -> Result<Outcome_> {
    let g = parse_gadget(&read(gadget)?).with_context(|| format!("invalid gadget file {}", gadget.display()))?;
    let reports = g.check_witnesses();
    let (mut confirmed, mut deviating, mut incoherent) = (0, 0, 0);
    let entries: Vec<Value> = reports
        .iter()
        .map(|r| {
            let status = if !r.coherent() {
                incoherent += 1;
                "incoherent"
            } else if r.fully_confirmed(g.pure) {
                confirmed += 1;
                "confirmed"
            } else {
                deviating += 1;
                "deviating"
            };
            json!({
                "name": r.name,
                "status": status,
                "incoherence": r.incoherence,
                "environment": r.environment.map(|(a, b)| json!([a, b])),
                "within_bounds": r.within_bounds,
                "pure": r.pure,
                "solved": r.solved.len(),
                "unsolved": r.unsolved,
                "not_atoms": r.not_atoms,
            })
        })
        .collect();
    let mut report = Report::new(format!(
        "{} witnesses: {confirmed} confirmed, {deviating} deviating, {incoherent} incoherent",
        reports.len()
    ));
    report
        .set("file", gadget.display().to_string())
        .set("rho", g.rho)
        .set("kappa", g.kappa)
        .set("pure", g.pure)
        .set("warnings", g.warnings.clone())
        .set("witnesses", entries);
    Ok((report, if deviating + incoherent == 0 { Verdict::Yes } else { Verdict::No }))
}
