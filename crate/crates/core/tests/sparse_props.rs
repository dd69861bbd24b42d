use proptest::prelude::*;
use toeplitz_core::assembly::{assemble, reduced_matrix};
use toeplitz_core::bases::BasisFamily;
use toeplitz_core::numeric::{numerical_rank, MultiIndex, C64};
use toeplitz_core::sparse::{is_n_sparse, line_density, zset, Direction, IndexSet};
use toeplitz_core::weights::{PointDistribution, WeightSpec};

fn index_set() -> impl Strategy<Value = IndexSet> {
    let leaf = prop_oneof![
        (2u64..7, 0u64..7).prop_map(|(m, r)| IndexSet::Modulus {
            modulus: m,
            residue: r % m,
            weights: vec![],
        }),
        (2u32..4).prop_map(|e| IndexSet::Powers {
            exponent: e,
            weights: vec![],
        }),
        Just(IndexSet::Empty),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(|sets| IndexSet::Union { sets }),
            (inner, 0u32..4).prop_map(|(s, b)| s.shifted(MultiIndex::scalar(b))),
        ]
    })
}

fn direction() -> impl Strategy<Value = Direction> {
    (1u32..4).prop_map(|g| Direction::from_slice(&[g]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_a_fraction_and_monotone(
        j1 in index_set(), extra in index_set(), gamma in direction(), a in 0u32..10, h in 1u64..500,
    ) {
        let alpha = MultiIndex::scalar(a);
        let j2 = IndexSet::Union { sets: vec![j1.clone(), extra] };
        let d1 = line_density(&j1, &gamma, &alpha, h).unwrap();
        let d2 = line_density(&j2, &gamma, &alpha, h).unwrap();
        prop_assert!((0.0..=1.0).contains(&d1) && (0.0..=1.0).contains(&d2));
        prop_assert!(d1 <= d2);
    }

    /// The excluded rays form 2N shifts of `J`, so their densities subtract at most additively.
    #[test]
    fn zset_density_is_subadditive(
        j in index_set(),
        shifts in prop::collection::vec((0u32..12, 0u32..12), 1..4),
        gamma in direction(),
        h in 1u64..400,
    ) {
        let alphas: Vec<MultiIndex> = shifts.iter().map(|s| MultiIndex::scalar(s.0)).collect();
        let betas: Vec<MultiIndex> = shifts.iter().map(|s| MultiIndex::scalar(s.1)).collect();
        let z = zset(&j, &alphas, &betas, &gamma, h).unwrap();
        let densities: Vec<f64> = alphas
            .iter()
            .chain(&betas)
            .map(|a| line_density(&j, &gamma, a, h).unwrap())
            .collect();
        let delta = densities.iter().copied().fold(0.0, f64::max);
        let sum: f64 = densities.iter().sum();
        prop_assert!(z.density >= 1.0 - sum - 1e-12);
        prop_assert!(z.density >= 1.0 - 2.0 * alphas.len() as f64 * delta - 1e-12);
    }

    #[test]
    fn reduction_never_raises_rank(
        atoms in prop::collection::vec(
            ((0.1f64..0.85, 0.0f64..std::f64::consts::TAU), (0.5f64..2.0, 0.0f64..std::f64::consts::TAU)),
            1..6,
        ),
        sparse_set in prop_oneof![
            (5u64..9).prop_map(IndexSet::multiples),
            Just(IndexSet::squares()),
        ],
    ) {
        let gamma = Direction::from_slice(&[1]).unwrap();
        prop_assert!(is_n_sparse(&sparse_set, &gamma, 4, None, 10_000).unwrap().sparse);
        let pts: Vec<(C64, C64)> = atoms
            .iter()
            .map(|&((r, t), (m, p))| (C64::from_polar(r, t), C64::from_polar(m, p)))
            .collect();
        let f = WeightSpec::Points(PointDistribution::masses(&pts));
        let a = assemble(&f, &BasisFamily::disk(16), &BasisFamily::disk(16)).unwrap();
        let full = numerical_rank(&a.to_float(), 1e-10).unwrap();
        let reduced = numerical_rank(&reduced_matrix(&a, &sparse_set).unwrap().to_float(), 1e-10).unwrap();
        prop_assert!(reduced <= full && full <= pts.len(), "{} {} {}", reduced, full, pts.len());
    }
}
