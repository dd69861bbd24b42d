use proptest::prelude::*;
use toeplitz_core::assembly::assemble;
use toeplitz_core::bases::BasisFamily;
use toeplitz_core::numeric::{ExactComplex, MultiIndex, C64};
use toeplitz_core::rank_lab::{
    check_lemma_equivalence, recover_point_masses, symmetric_derivative_test,
    vandermonde_vanishing, DerivativeBudget, ExactPoly, ExpansionBudget, FiniteFunctional,
    RecoveryOptions,
};
use toeplitz_core::weights::{PointDistribution, WeightSpec};

fn q(num: i64, den: i64) -> ExactComplex {
    ExactComplex::from_ratio(num, den)
}

/// Small Gaussian rationals, with repeats allowed so coincident atoms occur.
fn pool_point() -> impl Strategy<Value = ExactComplex> {
    prop::sample::select(vec![
        q(0, 1),
        q(1, 2),
        q(-1, 3),
        ExactComplex::i() * q(2, 3),
        q(1, 4) + ExactComplex::i() * q(-1, 2),
        q(-3, 4) + ExactComplex::i() * q(1, 5),
    ])
}

fn coefficient() -> impl Strategy<Value = ExactComplex> {
    prop::sample::select(vec![
        q(1, 1),
        q(-2, 1),
        q(1, 2) + ExactComplex::i(),
        q(0, 1),
        q(3, 2) * ExactComplex::i(),
    ])
}

fn functional(max_atoms: usize) -> impl Strategy<Value = FiniteFunctional> {
    prop::collection::vec((pool_point(), coefficient()), 1..=max_atoms)
        .prop_map(|a| FiniteFunctional::planar(&a))
}

fn wide_budget() -> ExpansionBudget {
    ExpansionBudget {
        max_terms: 1 << 40,
        max_conditions: 1 << 40,
    }
}

fn exponents(n: usize) -> impl Strategy<Value = Vec<MultiIndex>> {
    prop::collection::vec(0u32..6, n).prop_map(|v| v.into_iter().map(MultiIndex::scalar).collect())
}

fn small_poly(n: usize) -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec(
        (prop::collection::vec(0u32..3, n), -4i64..5, -4i64..5),
        1..4,
    )
    .prop_map(move |t| {
        ExactPoly::from_terms(
            n,
            t.into_iter()
                .map(|(a, re, im)| (MultiIndex::new(a), ExactComplex::from_gaussian(re, im))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma_biconditional_holds(phi in functional(4), r in 0usize..4, extra in 0u32..8) {
        let degree = (r as u32 + 1 + extra).min(8);
        let report = check_lemma_equivalence(&phi, r, degree, &wide_budget()).unwrap();
        prop_assert!(report.biconditional, "{}", report);
    }

    #[test]
    fn vanishing_value_ignores_joint_permutation(
        phi in functional(4),
        (j, k) in (1usize..4).prop_flat_map(|n| (exponents(n), exponents(n))),
        seed in any::<u64>(),
    ) {
        let n = j.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        let mut s = seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let pj: Vec<MultiIndex> = perm.iter().map(|&i| j[i].clone()).collect();
        let pk: Vec<MultiIndex> = perm.iter().map(|&i| k[i].clone()).collect();
        let a = vandermonde_vanishing(&phi, &j, &k, &wide_budget()).unwrap();
        let b = vandermonde_vanishing(&phi, &pj, &pk, &wide_budget()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn symmetric_argument_kills_the_test(sym in small_poly(3), other in small_poly(3), left in any::<bool>()) {
        let sym = sym.symmetrize();
        prop_assert!(sym.is_symmetric());
        let budget = DerivativeBudget::default();
        let v = if left {
            symmetric_derivative_test(&sym, &other, 3, &budget).unwrap()
        } else {
            symmetric_derivative_test(&other, &sym, 3, &budget).unwrap()
        };
        prop_assert!(v.is_zero(), "{}", v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recovery_inverts_assembly(
        atoms in prop::collection::vec(
            ((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), (0.5f64..2.0, 0.0f64..std::f64::consts::TAU)),
            1..=5,
        ),
    ) {
        let pts: Vec<(C64, C64)> = atoms
            .iter()
            .map(|&((u, t), (m, p))| (C64::from_polar(0.8 * u.sqrt(), t), C64::from_polar(m, p)))
            .collect();
        let separated = pts.iter().enumerate().all(|(i, a)| pts[..i].iter().all(|b| (a.0 - b.0).norm() >= 0.15));
        prop_assume!(separated);
        let f = WeightSpec::Points(PointDistribution::masses(&pts));
        let m = assemble(&f, &BasisFamily::disk(12), &BasisFamily::disk(12)).unwrap();
        let rec = recover_point_masses(&m, 5, &RecoveryOptions::default()).unwrap();
        prop_assert_eq!(rec.points.len(), pts.len());
        for (z, c) in &pts {
            let i = (0..rec.points.len())
                .min_by(|&a, &b| (rec.points[a] - z).norm().total_cmp(&(rec.points[b] - z).norm()))
                .unwrap();
            prop_assert!((rec.points[i] - z).norm() < 1e-6, "{} vs {}", rec.points[i], z);
            prop_assert!((rec.coefficients[i] - c).norm() < 1e-6 * c.norm());
        }
    }
}

#[test]
fn vandermonde_pairing_is_nonzero() {
    let budget = DerivativeBudget::default();
    for n in 2..=4 {
        let v = ExactPoly::vandermonde(n);
        assert!(!symmetric_derivative_test(&v, &v, n, &budget)
            .unwrap()
            .is_zero());
    }
}
