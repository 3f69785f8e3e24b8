mod common;

use common::fm_feasible;
use ersynth_core::{rescale_to_integers, Constraint, LinearSystem, Rational, Relation};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Eq), Just(Relation::Ge)]
}

/// Arbitrary small systems: up to 6 variables, coefficients in -2..=2.
fn any_system() -> impl Strategy<Value = LinearSystem> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::vec(-2i64..=2, n), relation(), -3i64..=3), 1..=6).prop_map(move |rows| {
            let mut sys = LinearSystem::new(n);
            for (coeffs, rel, rhs) in rows {
                sys.push(Constraint::from_ints(&coeffs, rel, rhs));
            }
            sys
        })
    })
}

/// Systems shaped like region systems: every row is homogeneous, `<= -1` or `>= 1`,
/// so positive integer multiples of a solution stay solutions.
fn scale_invariant_system() -> impl Strategy<Value = LinearSystem> {
    let row = prop_oneof![
        (relation(), Just(0i64)),
        Just((Relation::Le, -1i64)),
        Just((Relation::Ge, 1i64)),
    ];
    (1usize..=6).prop_flat_map(move |n| {
        prop::collection::vec((prop::collection::vec(-2i64..=2, n), row.clone()), 1..=6).prop_map(move |rows| {
            let mut sys = LinearSystem::new(n);
            for (coeffs, (rel, rhs)) in rows {
                sys.push(Constraint::from_ints(&coeffs, rel, rhs));
            }
            sys
        })
    })
}

fn as_rationals(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simplex_agrees_with_elimination(sys in any_system()) {
        let point = sys.feasible();
        prop_assert_eq!(point.is_some(), fm_feasible(&sys), "{}", sys);
        if let Some(x) = point {
            prop_assert!(sys.satisfied_by(&x));
        }
    }

    #[test]
    fn integer_multiples_stay_feasible(sys in scale_invariant_system(), k in 1i64..6) {
        if let Some(x) = sys.feasible() {
            let kr = Rational::from_integer(k.into());
            let scaled: Vec<Rational> = x.iter().map(|v| v * &kr).collect();
            prop_assert!(sys.satisfied_by(&scaled));
        }
    }

    #[test]
    fn rescaling_is_the_least_integer_multiple(sys in scale_invariant_system()) {
        if let Some(x) = sys.feasible() {
            let z = rescale_to_integers(&x);
            prop_assert!(sys.satisfied_by(&as_rationals(&z)));
            if let Some(i) = x.iter().position(|v| !v.is_zero()) {
                let factor = Rational::from_integer(z[i].clone()) / &x[i];
                prop_assert!(factor > Rational::zero());
                for (a, b) in x.iter().zip(&z) {
                    prop_assert_eq!(a * &factor, Rational::from_integer(b.clone()));
                }
                prop_assert!(z.iter().fold(BigInt::zero(), |g, v| g.gcd(v)).is_one());
            } else {
                prop_assert!(z.iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn rescale_of_arbitrary_vectors(nums in prop::collection::vec((-20i64..=20, 1i64..=12), 1..8)) {
        let v: Vec<Rational> = nums.iter().map(|(p, q)| Rational::new((*p).into(), (*q).into())).collect();
        let z = rescale_to_integers(&v);
        prop_assert_eq!(z.len(), v.len());
        // no smaller positive multiple is integral: brute force over the candidate factors c/d
        if let Some(i) = v.iter().position(|x| !x.is_zero()) {
            let factor = Rational::from_integer(z[i].clone()) / &v[i];
            for d in 2i64..=6 {
                let smaller = &factor / Rational::from_integer(d.into());
                prop_assert!(v.iter().any(|x| !(x * &smaller).is_integer()));
            }
        }
    }
}
