//! Property tests for the algebraic core: ring axioms, the Leibniz
//! rule, grading additivity, substitution/evaluation compatibility, and
//! nullspace residuals.

use std::collections::BTreeMap;

use num::Zero;
use proptest::prelude::*;

use jetdiff::linalg::exact_nullspace;
use jetdiff::poly::{int, DiffPoly, Monomial, WeightedDegree};
use jetdiff::{VarSym, Q};

fn arb_var() -> impl Strategy<Value = VarSym> {
    prop_oneof![
        ((1u32..=3), (0u32..=3)).prop_map(|(i, j)| VarSym::jet(i, j)),
        (1u32..=3).prop_map(VarSym::CoeffA),
        Just(VarSym::T),
    ]
}

fn arb_rational() -> impl Strategy<Value = Q> {
    ((-20i64..=20), (1i64..=9)).prop_map(|(p, q)| Q::new(p.into(), q.into()))
}

fn arb_monomial() -> impl Strategy<Value = Monomial> {
    proptest::collection::vec((arb_var(), 1u32..=3), 0..=3)
        .prop_map(|pairs| Monomial::from_pairs(&pairs))
}

fn arb_poly() -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec((arb_monomial(), arb_rational()), 0..=4)
        .prop_map(DiffPoly::from_terms)
}

fn arb_point() -> impl Strategy<Value = BTreeMap<VarSym, Q>> {
    proptest::collection::vec(arb_rational(), 20).prop_map(|vals| {
        let mut vars: Vec<VarSym> = (1u32..=3)
            .flat_map(|i| (0u32..=3).map(move |j| VarSym::jet(i, j)))
            .collect();
        vars.extend((1u32..=3).map(VarSym::CoeffA));
        vars.push(VarSym::T);
        vars.into_iter().zip(vals).collect()
    })
}

proptest! {
    #[test]
    fn addition_commutes_and_associates(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
    }

    #[test]
    fn multiplication_commutes_associates_distributes(
        p in arb_poly(), q in arb_poly(), r in arb_poly()
    ) {
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
    }

    #[test]
    fn additive_and_multiplicative_identities(p in arb_poly()) {
        prop_assert_eq!(p.add(&DiffPoly::zero()), p.clone());
        prop_assert_eq!(p.mul(&DiffPoly::one()), p.clone());
        prop_assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn leibniz_rule(p in arb_poly(), q in arb_poly()) {
        let lhs = p.mul(&q).total_derivative();
        let rhs = p.total_derivative().mul(&q).add(&p.mul(&q.total_derivative()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn weighted_degree_additive_on_isobaric(m1 in arb_monomial(), m2 in arb_monomial(), c in arb_rational()) {
        prop_assume!(!c.is_zero());
        let p = DiffPoly::term(m1, c.clone());
        let q = DiffPoly::term(m2, c);
        let (WeightedDegree::Isobaric(a), WeightedDegree::Isobaric(b)) =
            (p.weighted_degree(), q.weighted_degree()) else {
            return Err(TestCaseError::fail("single terms are isobaric"));
        };
        prop_assert_eq!(p.mul(&q).weighted_degree(), WeightedDegree::Isobaric(a + b));
    }

    #[test]
    fn substitution_commutes_with_evaluation(p in arb_poly(), point in arb_point()) {
        // substituting constants then reading the constant equals evaluating
        let assignment: BTreeMap<VarSym, DiffPoly> = point
            .iter()
            .map(|(v, q)| (*v, DiffPoly::constant(q.clone())))
            .collect();
        let substituted = p.substitute(&assignment);
        let evaluated = p.evaluate(&point).unwrap();
        prop_assert_eq!(substituted.as_constant(), Some(evaluated));
    }

    #[test]
    fn evaluation_is_a_ring_map(p in arb_poly(), q in arb_poly(), point in arb_point()) {
        let pv = p.evaluate(&point).unwrap();
        let qv = q.evaluate(&point).unwrap();
        prop_assert_eq!(p.add(&q).evaluate(&point).unwrap(), &pv + &qv);
        prop_assert_eq!(p.mul(&q).evaluate(&point).unwrap(), pv * qv);
    }

    #[test]
    fn nullspace_vectors_annihilate(entries in proptest::collection::vec(-5i64..=5, 12)) {
        let rows: Vec<Vec<Q>> = entries
            .chunks(4)
            .map(|c| c.iter().map(|&x| int(x)).collect())
            .collect();
        let basis = exact_nullspace(&rows, 4);
        for v in &basis {
            for row in &rows {
                let dot: Q = row.iter().zip(v).map(|(a, b)| a * b).sum();
                prop_assert!(dot.is_zero());
            }
        }
    }
}
