//! Reference values computed independently of the library's quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toeplitz_core::assembly::{assemble, assemble_radial_monomial, reduced_matrix};
use toeplitz_core::bases::{BasisFamily, BasisSpec};
use toeplitz_core::func::{Func, ZPoly};
use toeplitz_core::numeric::{max_abs_diff, numerical_rank, CMatrix, MultiIndex, C64};
use toeplitz_core::physics::helmholtz::{harmonic_count, helmholtz_direct};
use toeplitz_core::physics::landau::{
    creation_apply, landau_toeplitz, CreationConvention, GridFunction, LandauConfig,
};
use toeplitz_core::sparse::IndexSet;
use toeplitz_core::weights::{
    cauchy_transform, fourier_transform, project_measure, radial_moment, PointDistribution,
    RadialDensity, RadialProfile, WeightSpec,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn parabolic_bump_moments_match_antiderivative() {
    // 1 − 4(r − 1/2)² = 4r − 4r² on [0, 1]
    let p = RadialProfile::ParabolicBump {
        center: 0.5,
        half_width: 0.5,
    };
    for l in 0..25u32 {
        let l = f64::from(l);
        let want = 4.0 / (l + 2.0) - 4.0 / (l + 3.0);
        let got = radial_moment(&p, 1.0, l as u32).unwrap();
        assert!((got - want).abs() < 1e-12, "l={l}: {got} vs {want}");
    }
}

#[test]
fn dipole_cauchy_transform_decays_quadratically() {
    let f = WeightSpec::Points(PointDistribution::masses(&[
        (c(1.0, 0.0), c(1.0, 0.0)),
        (c(-1.0, 0.0), c(-1.0, 0.0)),
    ]));
    let mut worst: f64 = 0.0;
    for k in 0..64 {
        let z = C64::from_polar(10.0, f64::from(k) * std::f64::consts::TAU / 64.0);
        let g = cauchy_transform(&f, z).unwrap();
        // 1/(π(z − 1)) − 1/(π(z + 1)) = 2/(π(z² − 1))
        let want = 2.0 / (std::f64::consts::PI * (z * z - 1.0));
        assert!((g - want).norm() < 1e-15);
        worst = worst.max(g.norm() * 100.0);
    }
    assert!(worst < 2.0 / std::f64::consts::PI * 1.02, "{worst}");
}

#[test]
fn projected_point_mass_has_exponential_transform() {
    let mu = WeightSpec::Points(PointDistribution::real_masses(&[(
        vec![0.2, 0.5],
        c(3.0, 0.0),
    )]));
    let mut g = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let th: f64 = g.random_range(0.0..std::f64::consts::TAU);
        let t: f64 = g.random_range(-10.0..10.0);
        let zeta = [th.cos(), th.sin()];
        let proj = project_measure(&mu, &zeta).unwrap();
        let want = C64::from_polar(3.0, -t * (0.2 * zeta[0] + 0.5 * zeta[1]));
        assert!((fourier_transform(&proj, &[t]).unwrap() - want).norm() < 1e-14);
    }
}

/// `r² z² z̄` against `e_j ē_k`: nonzero only at `k = j + 1`, where it is
/// `√((j+1)(j+2)) · 2∫₀¹ r^{2j+7} dr`.
#[test]
fn radial_shift_entries_match_polar_integral() {
    let n = 12;
    let want = CMatrix::from_fn(n, n, |j, k| {
        if k == j + 1 {
            let jf = j as f64;
            c(
                ((jf + 1.0) * (jf + 2.0)).sqrt() * 2.0 / (2.0 * jf + 8.0),
                0.0,
            )
        } else {
            c(0.0, 0.0)
        }
    });
    let profile = RadialProfile::Polynomial {
        coeffs: vec![0.0, 0.0, 1.0],
    };
    let closed = assemble_radial_monomial(&profile, 1.0, 2, 1, n)
        .unwrap()
        .to_float();
    let f = WeightSpec::Radial(RadialDensity::disk(profile, 1.0).with_angular(2, 1));
    let quad = assemble(&f, &BasisFamily::disk(n), &BasisFamily::disk(n))
        .unwrap()
        .to_float();
    assert!(max_abs_diff(&closed, &want) < 1e-12);
    assert!(max_abs_diff(&quad, &want) < 1e-10);
}

#[test]
fn restricted_point_mass_keeps_rank_one() {
    let f = WeightSpec::Points(PointDistribution::masses(&[(c(0.4, -0.3), c(1.5, 0.5))]));
    let a = assemble(&f, &BasisFamily::disk(12), &BasisFamily::disk(12)).unwrap();
    let r = reduced_matrix(&a, &IndexSet::multiples(2)).unwrap();
    assert_eq!(r.nrows(), 6);
    assert_eq!(numerical_rank(&r.to_float(), 1e-10).unwrap(), 1);
}

#[test]
fn creation_of_ground_state_is_orthogonal_to_it() {
    let b = 2.0;
    let cfg = LandauConfig::new(b, 0, 6);
    let (l, pts) = (cfg.half_width(), cfg.grid_points);
    let ground = |s: u32| Func::ZGauss {
        poly: ZPoly::monomial(&MultiIndex::scalar(s), &MultiIndex::scalar(0), c(1.0, 0.0)),
        c: b / 4.0,
    };
    let xs: Vec<GridFunction> = (0..6)
        .map(|s| GridFunction::sample(&ground(s), l, pts))
        .collect();
    for u in &xs {
        let up = creation_apply(u, b, CreationConvention::Symmetric).unwrap();
        for v in &xs {
            let ratio = up.inner(v).norm() / (up.norm() * v.norm());
            assert!(ratio < 1e-8, "{ratio:e}");
        }
    }
}

/// `λ_s = ∫_{|z|<1} |z|^{2s} e^{−|z|²} dA / (π s!) = 1 − e^{−1} Σ_{k≤s} 1/k!`.
#[test]
fn disk_indicator_spectrum_in_lowest_level() {
    let v = WeightSpec::Radial(RadialDensity::disk(RadialProfile::constant(1.0), 1.0));
    let n = 10;
    let (m, report) = landau_toeplitz(&v, &LandauConfig::new(2.0, 0, n), 1e-12).unwrap();
    let a = m.to_float();
    let mut partial = 0.0;
    let mut term = 1.0;
    for s in 0..n {
        if s > 0 {
            term /= s as f64;
        }
        partial += term;
        let want = 1.0 - (-1.0f64).exp() * partial;
        assert!(
            (a[(s, s)].re - want).abs() < 1e-12,
            "s={s}: {} vs {want}",
            a[(s, s)].re
        );
        assert!(a[(s, s)].re > 0.0 && a[(s, s)].re < 1.0);
        if s > 0 {
            assert!(a[(s, s)].re < a[(s - 1, s - 1)].re);
        }
    }
    let eig = report.eigenvalues.unwrap();
    assert!(eig.iter().all(|&e| e > 0.0 && e < 1.0));
}

/// Separable `g(x₁)G(x′)` factors as `ĝ(2)` times the plane matrix of `G`.
#[test]
fn separable_helmholtz_weight_factors() {
    let g = [(0.1, c(1.0, 0.0)), (-0.35, c(0.5, -0.2))];
    let big_g = [
        (vec![0.2, -0.1], c(1.0, 0.3)),
        (vec![-0.3, 0.25], c(-0.6, 0.0)),
        (vec![0.05, 0.4], c(0.4, 0.9)),
    ];
    let mut atoms = Vec::new();
    for (x1, a) in g {
        for (xp, b) in &big_g {
            atoms.push((vec![x1, xp[0], xp[1]], a * b));
        }
    }
    let f = WeightSpec::Points(PointDistribution::real_masses(&atoms));
    let size = harmonic_count(3);
    let direct = helmholtz_direct(&f, size).unwrap().to_float();
    let g_hat: C64 = g
        .iter()
        .map(|(x1, a)| a * C64::from_polar(1.0, -2.0 * x1))
        .sum();
    let plane = WeightSpec::Points(PointDistribution::real_masses(&big_g));
    let fam = BasisFamily::new(BasisSpec::harmonic2(), size).unwrap();
    let want = assemble(&plane, &fam, &fam).unwrap().to_float() * g_hat;
    assert!(max_abs_diff(&direct, &want) < 1e-13);
}
