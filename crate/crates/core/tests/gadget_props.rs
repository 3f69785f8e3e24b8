mod common;

use common::{EX4, EX6};
use ersynth_core::gadgets::*;
use ersynth_core::{atoms, build_net, verify, Region, SeparationAtom};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hs_instance() -> impl Strategy<Value = HSInstance> {
    (1usize..=6, 1usize..=5, 1usize..=4).prop_flat_map(|(n, m, lambda)| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=n.min(3)), m)
            .prop_map(move |sets| HSInstance::new(n, sets.into_iter().map(|s| s.into_iter().collect()).collect(), lambda).unwrap())
    })
}

/// Random cubic instance: each variable placed in three distinct clauses.
fn cubic_instance(seed: u64, m: usize) -> OneInThreeInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut slots: Vec<usize> = (0..m).flat_map(|v| [v; 3]).collect();
        slots.shuffle(&mut rng);
        let clauses: Vec<Vec<usize>> = slots.chunks(3).map(<[usize]>::to_vec).collect();
        if clauses.iter().all(|c| c[0] != c[1] && c[1] != c[2] && c[0] != c[2]) {
            return OneInThreeInstance::new(clauses).unwrap();
        }
    }
}

/// Counted component by component: T-rows, ⊥/⊤/△ chains, F and G gadgets.
fn hs_counts(inst: &HSInstance) -> (usize, usize, usize) {
    let (n, m, lam) = (inst.n, inst.sets.len(), inst.lambda);
    let rows: usize = inst.sets.iter().map(|s| s.len() + 3).sum();
    let row_edges: usize = inst.sets.iter().map(|s| s.len() + 2).sum();
    let states = rows + m + lam + (m - 1) + 2 * lam + 2 * (m - 1);
    let k_and_x = 1 + n;
    let connectors = m + (m - 1) + lam + lam + (m - 1) + (m - 1);
    let gadget_events = 2 * lam + 2 * (m - 1);
    let edges = row_edges + (m - 1) + 3 * lam + 2 * (m - 1) + connectors;
    (states, k_and_x + connectors + gadget_events, edges)
}

fn pure_counts(m: usize) -> (usize, usize, usize) {
    let third = m / 3;
    let per_clause_edges = 3 + third + 1 + 2 * third + third;
    (2 + 6 * m, 1 + m + 2 * third + 2 * m * third, 1 + 2 * third + m * per_clause_edges)
}

fn distinguished_is_essa(g: &GadgetOutput) -> bool {
    match g.distinguished_atom {
        SeparationAtom::Essa(e, s) => g.ts.delta(s, e).is_none(),
        SeparationAtom::Ssa(..) => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn hs_gadgets_follow_closed_forms(inst in hs_instance()) {
        let g = build_hs_gadget(&inst).unwrap();
        prop_assert!(g.ts.validate().is_empty());
        prop_assert_eq!((g.ts.num_states(), g.ts.num_events(), g.ts.num_edges()), hs_counts(&inst));
        prop_assert_eq!((g.rho, g.kappa, g.pure), (2 * inst.lambda, inst.lambda + 1, false));
        prop_assert_eq!(g.distinguished_atom.label(&g.ts), "(k,t0_1)");
        prop_assert!(distinguished_is_essa(&g));
        prop_assert_eq!(parse_gadget(&g.to_text()).unwrap(), g.clone());
        prop_assert_eq!(g.warnings.is_empty(), inst.lambda >= HS_LAMBDA_THRESHOLDS.0);
        for report in g.check_witnesses() {
            prop_assert!(report.coherent(), "{:?}", report);
            if report.name.starts_with("fact1.R3") || report.name.starts_with("fact1.R4") {
                prop_assert!(report.unsolved.is_empty(), "{:?}", report);
            }
        }
        match solve_hs_brute(&inst) {
            Some(set) => {
                prop_assert!(inst.is_hitting_set(&set) && set.len() <= inst.lambda);
                prop_assert_eq!(g.solution.as_ref(), Some(&set));
                let r1 = g.witness("fact1.R1").unwrap().resolve(&g.ts).unwrap();
                prop_assert!(r1.solves(&g.distinguished_atom));
                let (pre, post) = r1.environment();
                prop_assert!(pre <= 2 * inst.lambda && post == inst.lambda + 1);
                prop_assert_eq!(extract_hitting_set(&g, &r1).unwrap(), set);
            }
            None => prop_assert!(g.solution.is_none()),
        }
    }

    #[test]
    fn pure_gadgets_follow_closed_forms(seed in any::<u64>(), m in prop::sample::select(vec![3usize, 6, 9, 12])) {
        let inst = cubic_instance(seed, m);
        let g = build_1in3_gadget(&inst);
        prop_assert!(g.ts.validate().is_empty());
        prop_assert_eq!((g.ts.num_states(), g.ts.num_events(), g.ts.num_edges()), pure_counts(m));
        prop_assert_eq!((g.rho, g.kappa, g.pure), (m, g.ts.num_events(), true));
        prop_assert_eq!(g.distinguished_atom.label(&g.ts), "(k,h1)");
        prop_assert!(distinguished_is_essa(&g));
        prop_assert_eq!(parse_gadget(&g.to_text()).unwrap(), g.clone());
        match solve_1in3_brute(&inst) {
            Some(model) => {
                prop_assert!(inst.is_model(&model) && model.len() == m / 3);
                prop_assert_eq!(g.warnings.is_empty(), m >= 6);
                for report in g.check_witnesses() {
                    if m < 6 && report.name.starts_with("fact9.R1") {
                        prop_assert!(!report.within_bounds);
                        prop_assert_eq!(report.environment.map(|e| e.0), Some(m / 3 + 3));
                    } else {
                        prop_assert!(report.fully_confirmed(true), "{:?}", report);
                    }
                }
                let r0 = g.witness("fact5.R0").unwrap().resolve(&g.ts).unwrap();
                prop_assert_eq!(extract_hitting_set(&g, &r0).unwrap(), model);
            }
            None => prop_assert!(g.solution.is_none()),
        }
    }
}

#[test]
fn hs_witnesses_fit_bounds_from_lambda_six() {
    let sets: Vec<Vec<usize>> = (0..7).map(|i| {
        let mut s = vec![i, (i + 1) % 8, (i + 3) % 8];
        s.sort();
        s
    }).collect();
    let inst = HSInstance::new(8, sets, 6).unwrap();
    let g = build_hs_gadget(&inst).unwrap();
    assert!(g.warnings.is_empty());
    for report in g.check_witnesses() {
        assert!(report.coherent() && report.within_bounds, "{report:?}");
        // failed claims are confined to the witness families recorded as deviating
        let family = report.name.split('[').next().unwrap();
        if !report.unsolved.is_empty() {
            assert!(["fact1.R2", "fact2.R5", "fact2.R7"].contains(&family), "{report:?}");
        }
        if !report.not_atoms.is_empty() {
            assert_eq!(family, "fact3.R10", "{report:?}");
        }
    }
}

#[test]
fn below_threshold_witnesses_exceed_bounds() {
    let g = build_hs_gadget(&parse_hs(EX4).unwrap()).unwrap();
    assert!(!g.warnings.is_empty());
    let outside: Vec<String> = g.check_witnesses().into_iter().filter(|r| !r.within_bounds).map(|r| r.name).collect();
    assert!(!outside.is_empty());
    assert!(g.check_witnesses().iter().all(|r| r.coherent()));
}

#[test]
fn pure_witnesses_form_an_admissible_set() {
    let g = build_1in3_gadget(&parse_1in3(EX6).unwrap());
    let regions: Vec<Region> = g.witnesses.iter().map(|d| d.resolve(&g.ts).unwrap()).collect();
    assert!(regions.iter().all(|r| r.is_pure() && r.environment().0 <= g.rho));
    for atom in atoms(&g.ts) {
        assert!(regions.iter().any(|r| r.solves(&atom)), "{}", atom.label(&g.ts));
    }
    let net = build_net(&g.ts, &regions);
    assert!(verify(&g.ts, &net).unwrap().is_some());
}

#[test]
fn unsatisfiable_cubic_instance_has_no_solution() {
    // x0..x2 appear together in every clause of the first block and
    // x3..x5 in the second, each block pinned to a single chosen variable
    let inst = parse_1in3("1in3 6\n0 1 2\n0 1 2\n0 1 2\n3 4 5\n3 4 5\n3 4 5\n").unwrap();
    let model = solve_1in3_brute(&inst).unwrap();
    assert_eq!(model.len(), 2);
    let g = build_1in3_gadget(&inst);
    assert_eq!(g.solution, Some(model));
}
