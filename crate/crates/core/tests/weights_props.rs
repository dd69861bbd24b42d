use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use toeplitz_core::func::Func;
use toeplitz_core::numeric::{binomial, ExactComplex, MultiIndex, C64};
use toeplitz_core::weights::{
    cauchy_transform, fourier_transform, project_measure, PointDistribution, PolynomialDensity,
    RadialDensity, RadialProfile, WeightSpec,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn planar_points(max: usize) -> impl Strategy<Value = Vec<(C64, C64)>> {
    prop::collection::vec(
        (
            (0.0f64..0.9, 0.0f64..std::f64::consts::TAU),
            (-2.0f64..2.0, -2.0f64..2.0),
        ),
        1..=max,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|((r, t), (a, b))| (C64::from_polar(r, t), c(a, b)))
            .collect()
    })
}

fn scalar() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| c(a, b))
}

fn exponent() -> impl Strategy<Value = (u32, u32)> {
    (0u32..6, 0u32..6)
}

fn small_rational() -> impl Strategy<Value = ExactComplex> {
    (-6i64..7, 1i64..5, -6i64..7, 1i64..5).prop_map(|(a, b, p, q)| {
        ExactComplex::from_ratio(a, b) + ExactComplex::i() * ExactComplex::from_ratio(p, q)
    })
}

fn poly_density() -> impl Strategy<Value = PolynomialDensity> {
    prop::collection::vec((0u32..4, 0u32..4, small_rational()), 1..4)
        .prop_map(|t| PolynomialDensity::new(t, BigRational::new(BigInt::from(3), BigInt::from(4))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn point_pairing_is_linear(
        p in planar_points(4), q in planar_points(4), a in scalar(), b in scalar(), (s, t) in exponent(),
    ) {
        let f1 = WeightSpec::Points(PointDistribution::masses(&p));
        let f2 = WeightSpec::Points(PointDistribution::masses(&q));
        let mix = WeightSpec::linear_combination(a, &f1, b, &f2).unwrap();
        let phi = Func::z_monomial(&MultiIndex::scalar(s), &MultiIndex::scalar(t));
        let lhs = mix.pair(&phi).unwrap();
        let rhs = a * f1.pair(&phi).unwrap() + b * f2.pair(&phi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn polynomial_moments_are_exactly_linear(
        p in poly_density(), q in poly_density(),
        a in (-4i64..5, -4i64..5), b in (-4i64..5, -4i64..5), (s, t) in exponent(),
    ) {
        let (f1, f2) = (WeightSpec::Polynomial(p), WeightSpec::Polynomial(q));
        let (ea, eb) = (ExactComplex::from_gaussian(a.0, a.1), ExactComplex::from_gaussian(b.0, b.1));
        let mix = WeightSpec::linear_combination(ea.to_c64(), &f1, eb.to_c64(), &f2).unwrap();
        let (al, be) = (MultiIndex::scalar(s), MultiIndex::scalar(t));
        let lhs = mix.moment_exact(&al, &be).unwrap();
        let rhs = &ea * &f1.moment_exact(&al, &be).unwrap() + &eb * &f2.moment_exact(&al, &be).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn point_moments_are_conjugate_symmetric(p in planar_points(5), (s, t) in exponent()) {
        let f = WeightSpec::Points(PointDistribution::masses(&p));
        let (a, b) = (MultiIndex::scalar(s), MultiIndex::scalar(t));
        let lhs = f.moment(&a, &b).unwrap();
        let rhs = f.conj().moment(&b, &a).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()));
    }

    #[test]
    fn polynomial_moments_are_exactly_conjugate_symmetric(p in poly_density(), (s, t) in exponent()) {
        let f = WeightSpec::Polynomial(p);
        let (a, b) = (MultiIndex::scalar(s), MultiIndex::scalar(t));
        prop_assert_eq!(f.moment_exact(&a, &b).unwrap(), f.conj().moment_exact(&b, &a).unwrap().conj());
    }

    #[test]
    fn radial_moments_are_conjugate_symmetric(
        (al, be) in (0u32..4, 0u32..4), (s, t) in exponent(), k in scalar(),
    ) {
        let f = WeightSpec::Radial(RadialDensity {
            coeff: k,
            ..RadialDensity::disk(RadialProfile::PowerBump { radius: 0.9, power: 2 }, 0.9)
                .with_angular(al, be)
        });
        let (a, b) = (MultiIndex::scalar(s), MultiIndex::scalar(t));
        let lhs = f.moment(&a, &b).unwrap();
        let rhs = f.conj().moment(&b, &a).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
    }

    /// Exact for point masses: the images of `x·ζ` carry the same exponentials.
    #[test]
    fn projection_then_fourier_is_restricted_fourier(
        atoms in prop::collection::vec((prop::collection::vec(-1.0f64..1.0, 3), scalar()), 1..6),
        dir in prop::collection::vec(-1.0f64..1.0, 3),
        t in -5.0f64..5.0,
    ) {
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let zeta: Vec<f64> = dir.iter().map(|v| v / n).collect();
        let mu = WeightSpec::Points(PointDistribution::real_masses(&atoms));
        let proj = project_measure(&mu, &zeta).unwrap();
        let lhs = fourier_transform(&proj, &[t]).unwrap();
        let xi: Vec<f64> = zeta.iter().map(|z| z * t).collect();
        let rhs = fourier_transform(&mu, &xi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()), "{} vs {}", lhs, rhs);
    }
}

/// Least-squares slope of `log|G|` against `log|z|`.
fn decay_slope(f: &WeightSpec, direction: C64) -> f64 {
    let samples: Vec<(f64, f64)> = (0..=20)
        .map(|i| {
            let r = 10f64.powf(1.0 + f64::from(i) / 20.0);
            let g = cauchy_transform(f, direction * r).unwrap();
            (r.ln(), g.norm().ln())
        })
        .collect();
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx) * (s.0 - mx)).sum();
    sxy / sxx
}

/// Finite-difference weights kill every holomorphic moment of degree below `K`,
/// leaving `|G(z)| ~ |z|^{−(K+1)}`.
#[test]
fn cauchy_transform_decays_with_vanishing_moments() {
    for k in 0..=4u32 {
        for (h, dir) in [(0.3, c(1.0, 0.0)), (0.2, C64::from_polar(1.0, 1.1))] {
            let shift = c(0.05, -0.1);
            let atoms: Vec<(C64, C64)> = (0..=k)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let at = shift + c(h * (f64::from(j) - f64::from(k) / 2.0), 0.0) * c(0.6, 0.8);
                    (at, c(sign * binomial(k, j), 0.0))
                })
                .collect();
            let f = WeightSpec::Points(PointDistribution::masses(&atoms));
            for deg in 0..k {
                let m = f
                    .moment(&MultiIndex::scalar(deg), &MultiIndex::scalar(0))
                    .unwrap();
                assert!(m.norm() < 1e-13, "moment {deg} = {m}");
            }
            let slope = decay_slope(&f, dir);
            let want = -(f64::from(k) + 1.0);
            assert!(
                (slope - want).abs() < 0.05,
                "K={k}: slope {slope}, want {want}"
            );
        }
    }
}
