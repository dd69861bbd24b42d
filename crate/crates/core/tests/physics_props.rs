use proptest::prelude::*;
use toeplitz_core::numeric::{is_hermitian, C64};
use toeplitz_core::physics::born::{born_kernel, born_matrix};
use toeplitz_core::physics::helmholtz::{harmonic_count, helmholtz_two_path, TransformQuadrature};
use toeplitz_core::physics::landau::{
    cross_gram_max, landau_basis, landau_toeplitz, CreationConvention, LandauConfig,
};
use toeplitz_core::physics::sphere::{SamplingKind, SphereSampling};
use toeplitz_core::weights::{PointDistribution, RadialDensity, RadialProfile, WeightSpec};

fn bump(radius: f64, power: u32) -> WeightSpec {
    WeightSpec::Radial(RadialDensity::disk(
        RadialProfile::PowerBump { radius, power },
        radius,
    ))
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn real_potentials_give_hermitian_landau_matrices(
        radius in 0.5f64..2.5,
        power in 1u32..4,
        center in (-0.5f64..0.5, -0.5f64..0.5),
        q in 0u32..3,
    ) {
        let v = match bump(radius, power) {
            WeightSpec::Radial(r) => WeightSpec::Radial(r.with_center(vec![center.0, center.1])),
            _ => unreachable!(),
        };
        let (m, report) = landau_toeplitz(&v, &LandauConfig::new(2.0, q, 8), 1e-10).unwrap();
        let a = m.to_float();
        let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(is_hermitian(&a, 1e-12 * scale));
        prop_assert!(report.eigenvalues.is_some());
    }

    #[test]
    fn real_weights_give_hermitian_born_kernels(
        atoms in prop::collection::vec((prop::collection::vec(-0.5f64..0.5, 3), -2.0f64..2.0), 1..5),
        w in prop::collection::vec(-1.0f64..1.0, 3),
        s in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        prop_assume!(w.iter().any(|x| x.abs() > 0.1) && s.iter().any(|x| x.abs() > 0.1));
        let pts: Vec<(Vec<f64>, C64)> = atoms.into_iter().map(|(x, c)| (x, C64::new(c, 0.0))).collect();
        let f = WeightSpec::Points(PointDistribution::real_masses(&pts));
        let (w, s) = (unit(&w), unit(&s));
        let a = born_kernel(&f, &w, &s).unwrap();
        let b = born_kernel(&f, &s, &w).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-13 * (1.0 + a.norm()));
    }

    #[test]
    fn helmholtz_paths_agree_on_point_clouds(
        atoms in prop::collection::vec(
            (prop::collection::vec(-0.5f64..0.5, 3), (-2.0f64..2.0, -2.0f64..2.0)),
            1..5,
        ),
        degree in 1u32..5,
    ) {
        let pts: Vec<(Vec<f64>, C64)> = atoms.into_iter().map(|(x, (a, b))| (x, C64::new(a, b))).collect();
        let f = WeightSpec::Points(PointDistribution::real_masses(&pts));
        let r = helmholtz_two_path(&f, harmonic_count(degree), TransformQuadrature::default()).unwrap();
        prop_assert!(r.max_deviation <= 1e-8, "{}", r.max_deviation);
    }
}

#[test]
fn born_matrix_is_hermitian_for_a_real_ball() {
    let ball = WeightSpec::Radial(RadialDensity::ball(RadialProfile::constant(1.0), 0.7, 3));
    let sampling = SphereSampling::new(SamplingKind::Fibonacci { n: 16 }).unwrap();
    let (k, _) = born_matrix(&ball, &sampling, 1e-10).unwrap();
    assert!(is_hermitian(&k, 1e-12 * k[(0, 0)].norm()));
}

/// Level families compared on one grid: their default resolution, their widest extent.
#[test]
fn distinct_levels_are_orthogonal_on_a_shared_grid() {
    for convention in [CreationConvention::Symmetric] {
        for (b, n) in [(2.0, 24), (1.0, 12)] {
            let width = LandauConfig::new(b, 2, n).half_width();
            let bases: Vec<_> = (0..=2)
                .map(|q| {
                    landau_basis(&LandauConfig {
                        convention,
                        grid_half_width: Some(width),
                        ..LandauConfig::new(b, q, n)
                    })
                    .unwrap()
                })
                .collect();
            for a in 0..3 {
                for c in a + 1..3 {
                    let g = cross_gram_max(&bases[a], &bases[c]).unwrap();
                    assert!(g < 1e-6, "B={b} n={n} q={a},{c}: {g:e}");
                }
            }
        }
    }
}

#[test]
fn mismatched_grids_are_refused() {
    let a = landau_basis(&LandauConfig::new(2.0, 0, 4)).unwrap();
    let b = landau_basis(&LandauConfig::new(2.0, 1, 8)).unwrap();
    assert!(cross_gram_max(&a, &b).is_err());
}

/// No finite-rank plateau for a nonzero bump: rank at `1e-10` keeps pace with `n/2`.
#[test]
fn landau_rank_has_no_plateau() {
    let v = bump(1.0, 3);
    let mut short = Vec::new();
    for q in 0..=2 {
        for n in [8, 12, 16, 20, 24] {
            let (_, report) = landau_toeplitz(&v, &LandauConfig::new(2.0, q, n), 1e-10).unwrap();
            println!("q={q} n={n} rank={}", report.rank);
            if 2 * report.rank < n {
                short.push(format!("q={q} n={n} rank={}", report.rank));
            }
        }
    }
    assert!(short.is_empty(), "{}", short.join("; "));
}
