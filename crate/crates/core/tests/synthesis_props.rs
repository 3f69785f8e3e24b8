mod common;

use common::*;
use ersynth_core::*;
use ersynth_core::synth::selections;
use ersynth_core::Strategy as Search;
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ts_from_seed(seed: u64) -> TransitionSystem {
    random_ts(&mut ChaCha8Rng::seed_from_u64(seed), 5, 3)
}

fn run(ts: &TransitionSystem, rho: usize, kappa: usize, pure: bool, strategy: Search, jobs: usize) -> SynthesisResult {
    let bounds = RestrictionBounds::new(ts, Bound::At(rho), Bound::At(kappa), pure);
    let options = SynthesisOptions { config: SolverConfig::with_strategy(strategy), jobs, ..SynthesisOptions::default() };
    synthesize(ts, bounds, &options)
}

fn regions_of(out: &Outcome) -> Option<&[Region]> {
    match out {
        Outcome::Solved { regions, .. } => Some(regions),
        _ => None,
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn strategies_agree_and_certify(seed in any::<u64>(), rho in 0usize..4, kappa in 0usize..4, pure in any::<bool>()) {
        let ts = ts_from_seed(seed);
        let bounds = RestrictionBounds::new(&ts, Bound::At(rho), Bound::At(kappa), pure);
        let exhaustive = run(&ts, rho, kappa, pure, Search::Exhaustive, 1).outcome;
        let auto = run(&ts, rho, kappa, pure, Search::Auto, 1).outcome;
        let heuristic = run(&ts, rho, kappa, pure, Search::Heuristic, 1).outcome;
        let known = |o: &Outcome| !matches!(o, Outcome::Unknown { .. });
        prop_assert!(known(&exhaustive));
        prop_assert!(known(&auto));
        prop_assert_eq!(regions_of(&exhaustive).is_some(), regions_of(&auto).is_some());
        match &heuristic {
            Outcome::Solved { .. } => prop_assert!(regions_of(&exhaustive).is_some()),
            Outcome::Unsolvable { .. } => prop_assert!(regions_of(&exhaustive).is_none()),
            Outcome::Unknown { .. } => {}
        }
        for out in [&exhaustive, &auto, &heuristic] {
            if let Outcome::Solved { regions, origins, net } = out {
                prop_assert_eq!(regions.len(), origins.len());
                for (r, origin) in regions.iter().zip(origins) {
                    prop_assert!(r.check(&ts).is_ok());
                    prop_assert!(bounds.admits(r));
                    prop_assert!(r.solves(origin));
                    prop_assert!(!pure || r.is_pure());
                }
                for atom in atoms(&ts) {
                    prop_assert!(regions.iter().any(|r| r.solves(&atom)), "{}", atom.label(&ts));
                }
                prop_assert!(verify(&ts, net).unwrap().is_some());
                let env = net_environment(net);
                let expected: Vec<(usize, usize)> = regions.iter().map(Region::environment).collect();
                prop_assert_eq!(env.per_place, expected);
            }
        }
    }

    #[test]
    fn unsolvable_witness_is_really_unsolvable(seed in any::<u64>(), rho in 0usize..3, kappa in 0usize..3, pure in any::<bool>()) {
        let ts = ts_from_seed(seed);
        if let Outcome::Unsolvable { witness, failing } = run(&ts, rho, kappa, pure, Search::Exhaustive, 1).outcome {
            prop_assert_eq!(failing.first(), Some(&witness));
            let ob = OracleBounds { value_bound: 2, rho, kappa, pure };
            prop_assert!(brute_force_region(&ts, witness, ob).is_none());
        }
    }

    #[test]
    fn synthesis_is_deterministic(seed in any::<u64>(), rho in 0usize..4, kappa in 0usize..4, pure in any::<bool>()) {
        let ts = ts_from_seed(seed);
        for strategy in [Search::Exhaustive, Search::Heuristic, Search::Auto] {
            let first = run(&ts, rho, kappa, pure, strategy, 1).outcome;
            prop_assert_eq!(&run(&ts, rho, kappa, pure, strategy, 1).outcome, &first);
            prop_assert_eq!(&run(&ts, rho, kappa, pure, strategy, 3).outcome, &first);
        }
    }

    #[test]
    fn larger_bounds_keep_solutions(seed in any::<u64>(), rho in 0usize..3, kappa in 0usize..3, pure in any::<bool>()) {
        let ts = ts_from_seed(seed);
        if let Some(regions) = regions_of(&run(&ts, rho, kappa, pure, Search::Exhaustive, 1).outcome) {
            for (r2, k2, p2) in [(rho + 1, kappa, pure), (rho, kappa + 1, pure), (rho, kappa, false)] {
                let wider = RestrictionBounds::new(&ts, Bound::At(r2), Bound::At(k2), p2);
                prop_assert!(regions.iter().all(|r| wider.admits(r)));
                prop_assert!(regions_of(&run(&ts, r2, k2, p2, Search::Exhaustive, 1).outcome).is_some());
            }
        }
    }

    #[test]
    fn atom_solutions_are_certificates(seed in any::<u64>(), rho in 0usize..4, kappa in 0usize..4, pure in any::<bool>()) {
        let ts = ts_from_seed(seed);
        let tree = SpanningTree::new(&ts);
        let bounds = RestrictionBounds::new(&ts, Bound::At(rho), Bound::At(kappa), pure);
        for atom in atoms(&ts) {
            for strategy in [Search::Exhaustive, Search::Heuristic] {
                let out = solve_atom(&ts, &tree, &atom, bounds, SolverConfig::with_strategy(strategy));
                if let AtomOutcome::Solved(r) = out {
                    prop_assert!(r.check(&ts).is_ok() && r.solves(&atom) && bounds.admits(&r));
                } else if strategy == Search::Exhaustive {
                    prop_assert_eq!(out, AtomOutcome::Unsolvable);
                }
            }
        }
    }

    #[test]
    fn selections_respect_bounds(n in 0usize..6, rho in 0usize..7, kappa in 0usize..7, pure in any::<bool>()) {
        let all: Vec<SupportSelection> = selections(n, rho, kappa, pure).collect();
        for s in &all {
            prop_assert!(s.allowed_pro.len() <= rho && s.allowed_con.len() <= kappa);
            prop_assert!(!pure || s.is_disjoint());
        }
        let mut dedup = all.clone();
        dedup.sort_by(|a, b| (&a.allowed_pro, &a.allowed_con).cmp(&(&b.allowed_pro, &b.allowed_con)));
        dedup.dedup();
        prop_assert_eq!(dedup.len(), all.len());
        if !pure {
            let side = |k: usize| (0..=k.min(n)).map(|i| binomial(n, i)).sum::<usize>();
            prop_assert_eq!(all.len(), side(rho) * side(kappa));
        }
    }
}

#[test]
fn example_systems_have_fixed_outcomes() {
    let a3 = parse_ts(A3).unwrap();
    let out = run(&a3, 0, 1, false, Search::Auto, 1).outcome;
    let regions = regions_of(&out).expect("A3 is (0,1)-synthesizable");
    assert!(regions.iter().all(|r| r.environment() == (0, 1)));
    assert!(regions_of(&run(&a3, 0, 0, false, Search::Exhaustive, 1).outcome).is_none());
    for text in [A1, A2] {
        let ts = parse_ts(text).unwrap();
        let out = synthesize(&ts, RestrictionBounds::unbounded(&ts), &SynthesisOptions::default()).outcome;
        assert!(matches!(out, Outcome::Unsolvable { .. }));
    }
}
