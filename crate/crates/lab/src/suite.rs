//! The acceptance suite: one check per rigidity property, tolerances pinned here.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;
use toeplitz_core::assembly::{
    assemble, assemble_radial_monomial, assemble_with, point_masses, reduced_matrix,
    AssemblyOptions,
};
use toeplitz_core::bases::BasisFamily;
use toeplitz_core::numeric::{exact_rank, max_abs_diff, numerical_rank, ExactComplex};
use toeplitz_core::physics::born::{ball_indicator_transform, born_kernel, born_matrix};
use toeplitz_core::physics::helmholtz::{harmonic_count, helmholtz_two_path, TransformQuadrature};
use toeplitz_core::physics::landau::{cross_gram_max, landau_basis, landau_toeplitz, LandauConfig};
use toeplitz_core::physics::sphere::{rotate, rotation_from_quaternion, SphereSampling};
use toeplitz_core::rank_lab::{
    check_lemma_equivalence, recover_point_masses, symmetric_derivative_test,
    vandermonde_self_pairing, DerivativeBudget, ExactPoly, ExpansionBudget, FiniteFunctional,
    RecoveryOptions,
};
use toeplitz_core::sparse::{is_n_sparse, Direction, IndexSet};
use toeplitz_core::weights::{
    fourier_transform, project_measure, GridDensity, Location, PointDistribution,
    PolynomialDensity, RadialDensity, RadialProfile, WeightSpec,
};
use toeplitz_core::{CMatrix, MultiIndex, Result, C64};

use crate::sampling::{random_quaternion, rng, unit_vector3, PointSampler};

pub const RANK_TOL: f64 = 1e-10;
pub const LANDAU_RANK_TOL: f64 = 1e-8;
pub const LANDAU_OFF_DIAGONAL: f64 = 1e-8;
pub const LANDAU_CROSS_GRAM: f64 = 1e-6;
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const RECOVERY_TOL: f64 = 1e-8;
pub const PROJECTION_TOL: f64 = 1e-14;
pub const BORN_BALL_TOL: f64 = 1e-8;
pub const BORN_CHORD_TOL: f64 = 1e-10;
pub const HELMHOLTZ_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<36} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 20240601 }
    }
}

type Check = fn(&SuiteOptions) -> Result<(bool, String)>;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    /// Wall-clock ceiling, when the property includes one.
    pub limit: Option<Duration>,
    check: Check,
}

impl Criterion {
    pub fn run(&self, opts: &SuiteOptions) -> CriterionOutcome {
        let start = Instant::now();
        let result = (self.check)(opts);
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = self.limit {
            if elapsed > limit {
                passed = false;
                detail = format!("{detail}; exceeded {}s limit", limit.as_secs());
            }
        }
        CriterionOutcome {
            id: self.id,
            title: self.title,
            passed,
            detail,
            elapsed,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, title, limit: Option<u64>, check: Check| Criterion {
        id,
        title,
        limit: limit.map(Duration::from_secs),
        check,
    };
    vec![
        c(1, "point-mass rank rigidity", Some(10), point_mass_rank),
        c(2, "density rank growth", Some(60), density_rank_growth),
        c(
            3,
            "vanishing-condition biconditional",
            Some(120),
            lemma_biconditional,
        ),
        c(4, "derivative point distributions", None, derivative_points),
        c(5, "radial closed form", None, radial_closed_form),
        c(6, "reduced-matrix rigidity", None, reduced_rigidity),
        c(7, "symmetric differential witness", None, symmetric_witness),
        c(8, "point recovery round trip", None, recovery_round_trip),
        c(9, "Landau level sweep", None, landau_sweep),
        c(10, "projection Fourier identity", None, projection_fourier),
        c(11, "Born kernel", None, born_checks),
        c(12, "Helmholtz two-path agreement", None, helmholtz_paths),
    ]
}

pub fn criterion(id: u8) -> Option<Criterion> {
    criteria().into_iter().find(|c| c.id == id)
}

pub fn run_suite(opts: &SuiteOptions) -> Vec<CriterionOutcome> {
    criteria().iter().map(|c| c.run(opts)).collect()
}

fn point_mass_rank(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed ^ 1);
    let sampler = PointSampler::default();
    let n_max = 24;
    let disk = BasisFamily::disk(n_max);
    let mut bad = Vec::new();
    for trial in 0..100 {
        let r = 1 + trial % 5;
        let m = assemble(&point_masses(&sampler.sample(&mut g, r)), &disk, &disk)?;
        for n in r..=n_max {
            let got = numerical_rank(&m.leading(n).to_float(), RANK_TOL)?;
            if got != r {
                bad.push(format!("trial {trial}: r={r}, n={n}, rank={got}"));
                break;
            }
        }
    }
    Ok((
        bad.is_empty(),
        summarize("100 configurations, n = r..24", &bad),
    ))
}

fn summarize(ok: &str, bad: &[String]) -> String {
    match bad.first() {
        None => ok.to_string(),
        Some(first) => format!("{} failures, first: {first}", bad.len()),
    }
}

fn density_rank_growth(_: &SuiteOptions) -> Result<(bool, String)> {
    let q = ExactComplex::from_ratio;
    let radius = PolynomialDensity::one_on_unit_disk().radius;
    let densities = [
        (
            "1",
            PolynomialDensity::new(vec![(0, 0, q(1, 1))], radius.clone()),
        ),
        (
            "z z̄",
            PolynomialDensity::new(vec![(1, 1, q(1, 1))], radius.clone()),
        ),
        (
            "1+Re z",
            PolynomialDensity::new(
                vec![(0, 0, q(1, 1)), (1, 0, q(1, 2)), (0, 1, q(1, 2))],
                radius,
            ),
        ),
    ];
    let mut bad = Vec::new();
    for (name, f) in densities {
        let w = WeightSpec::Polynomial(f);
        for n in [2, 4, 8, 16] {
            let b = BasisFamily::monomial(n);
            let m = assemble_with(&w, &b, &b, AssemblyOptions::exact())?;
            let exact = m.exact().expect("exact assembly");
            let rank = exact_rank(exact);
            if rank != n {
                bad.push(format!("f={name}, n={n}, rank={rank}"));
            }
        }
    }
    Ok((
        bad.is_empty(),
        summarize("exact rank = n for n in {2,4,8,16}", &bad),
    ))
}

/// Fixed pool of Gaussian-rational locations.
fn atom_pool() -> Vec<ExactComplex> {
    let q = ExactComplex::from_ratio;
    let i = ExactComplex::i();
    vec![
        q(0, 1),
        q(1, 2),
        q(-1, 3) + i.clone() * q(1, 4),
        i.clone() * q(1, 2),
        q(1, 5) - i * q(2, 5),
    ]
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn lemma_biconditional(_: &SuiteOptions) -> Result<(bool, String)> {
    let q = ExactComplex::from_ratio;
    let pool = atom_pool();
    let palette = [q(1, 1), q(-2, 1), q(1, 2) + ExactComplex::i()];
    let degree_bound = 5;
    let budget = ExpansionBudget {
        max_terms: toeplitz_core::rank_lab::expansion_cost(degree_bound as usize, 3),
        ..ExpansionBudget::default()
    };
    let (mut functionals, mut low, mut high, mut conditions) = (0usize, 0usize, 0usize, 0u128);
    let mut bad = Vec::new();
    for set in subsets(pool.len(), 3) {
        // every coefficient assignment from the palette
        let combos = palette.len().pow(set.len() as u32);
        for code in 0..combos {
            let mut c = code;
            let atoms: Vec<(ExactComplex, ExactComplex)> = set
                .iter()
                .map(|&p| {
                    let coeff = palette[c % palette.len()].clone();
                    c /= palette.len();
                    (pool[p].clone(), coeff)
                })
                .collect();
            let phi = FiniteFunctional::planar(&atoms);
            functionals += 1;
            for r in 0..degree_bound as usize {
                let rep = check_lemma_equivalence(&phi, r, degree_bound, &budget)?;
                conditions += rep.conditions_checked;
                if rep.exact_rank <= r {
                    low += 1;
                } else {
                    high += 1;
                }
                if !rep.biconditional {
                    bad.push(format!(
                        "atoms {set:?}, code {code}, r={r}: rank {}, all_vanish {}",
                        rep.exact_rank, rep.all_vanish
                    ));
                }
            }
        }
    }
    Ok((
        bad.is_empty(),
        summarize(
            &format!("{functionals} functionals, {low} rank<=r and {high} rank>r cases, {conditions} conditions"),
            &bad,
        ),
    ))
}

fn derivative_points(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed ^ 4);
    let sampler = PointSampler::default();
    let n_max = 20;
    let disk = BasisFamily::disk(n_max);
    let mut bad = Vec::new();
    let mut plateau = None;
    for trial in 0..20 {
        let mut f = PointDistribution::new();
        for (z, _) in sampler.sample(&mut g, 2) {
            let at = Location::complex1(z);
            let zero = MultiIndex::zeros(1);
            let d1 = MultiIndex::scalar(1);
            f = f
                .with_term(
                    at.clone(),
                    sampler.coefficient(&mut g),
                    zero.clone(),
                    zero.clone(),
                )
                .with_term(
                    at.clone(),
                    sampler.coefficient(&mut g),
                    d1.clone(),
                    zero.clone(),
                )
                .with_term(at, sampler.coefficient(&mut g), zero, d1);
        }
        let m = assemble(&WeightSpec::Points(f), &disk, &disk)?;
        let ranks = (1..=n_max)
            .map(|n| numerical_rank(&m.leading(n).to_float(), RANK_TOL))
            .collect::<Result<Vec<_>>>()?;
        if let Some((n, r)) = ranks.iter().enumerate().find(|(_, &r)| r > 4) {
            bad.push(format!("trial {trial}: rank {r} at n={}", n + 1));
        }
        if ranks[5..].iter().any(|&r| r != ranks[5]) {
            bad.push(format!(
                "trial {trial}: ranks {:?} not constant from n=6",
                &ranks[5..]
            ));
        }
        plateau.get_or_insert(ranks[5]);
    }
    Ok((
        bad.is_empty(),
        summarize(
            &format!("20 configurations, plateau rank {}", plateau.unwrap_or(0)),
            &bad,
        ),
    ))
}

fn radial_closed_form(_: &SuiteOptions) -> Result<(bool, String)> {
    let n = 12;
    let disk = BasisFamily::disk(n);
    let profiles = [
        ("1", RadialProfile::constant(1.0), 1.0),
        (
            "r²",
            RadialProfile::Polynomial {
                coeffs: vec![0.0, 0.0, 1.0],
            },
            1.0,
        ),
        (
            "bump",
            RadialProfile::PowerBump {
                radius: 0.9,
                power: 3,
            },
            0.9,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (_, p, r) in &profiles {
        for alpha in 0..=2 {
            for beta in 0..=2 {
                let w = WeightSpec::Radial(
                    RadialDensity::disk(p.clone(), *r).with_angular(alpha, beta),
                );
                let quad = assemble(&w, &disk, &disk)?.to_float();
                let closed = assemble_radial_monomial(p, *r, alpha, beta, n)?.to_float();
                worst = worst.max(max_abs_diff(&quad, &closed));
            }
        }
    }
    let id = CMatrix::identity(n, n);
    let unit = WeightSpec::Radial(RadialDensity::disk(RadialProfile::constant(1.0), 1.0));
    let id_quad = max_abs_diff(&assemble(&unit, &disk, &disk)?.to_float(), &id);
    let id_closed = max_abs_diff(
        &assemble_radial_monomial(&RadialProfile::constant(1.0), 1.0, 0, 0, n)?.to_float(),
        &id,
    );
    let passed = worst < CLOSED_FORM_TOL && id_quad < IDENTITY_TOL && id_closed < IDENTITY_TOL;
    Ok((
        passed,
        format!("max deviation {worst:.2e}; identity deviation {id_quad:.2e} (quadrature), {id_closed:.2e} (closed form)"),
    ))
}

fn reduced_rigidity(opts: &SuiteOptions) -> Result<(bool, String)> {
    let j = IndexSet::multiples(5);
    let verdict = is_n_sparse(&j, &Direction::from_slice(&[1])?, 4, None, 10_000)?;
    if !verdict.sparse {
        return Ok((
            false,
            format!(
                "multiples of 5 measured not 4-sparse (density {})",
                verdict.max_density
            ),
        ));
    }
    let mut g = rng(opts.seed ^ 6);
    let sampler = PointSampler::default();
    let disk = BasisFamily::disk(24);
    let mut bad = Vec::new();
    for trial in 0..50 {
        let r = 1 + trial % 5;
        let m = assemble(&point_masses(&sampler.sample(&mut g, r)), &disk, &disk)?;
        let red = reduced_matrix(&m, &j)?;
        let got = numerical_rank(&red.to_float(), RANK_TOL)?;
        if got != r {
            bad.push(format!("trial {trial}: {r} atoms, reduced rank {got}"));
        }
    }
    Ok((
        bad.is_empty(),
        summarize(
            &format!(
                "4-sparse (max density {:.4}), 50 configurations",
                verdict.max_density
            ),
            &bad,
        ),
    ))
}

fn random_poly(g: &mut impl Rng, n: usize, terms: usize, max_deg: u32) -> ExactPoly {
    ExactPoly::from_terms(
        n,
        (0..terms).map(|_| {
            let a = MultiIndex::new((0..n).map(|_| g.random_range(0..=max_deg)).collect());
            let re = g.random_range(-5i64..=5);
            let im = g.random_range(-5i64..=5);
            let den = g.random_range(1i64..=4);
            (
                a,
                ExactComplex::from_gaussian(re, im) * ExactComplex::from_ratio(1, den),
            )
        }),
    )
}

fn symmetric_witness(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed ^ 7);
    let budget = DerivativeBudget::default();
    let mut bad = Vec::new();
    for trial in 0..20 {
        let n = 2 + trial % 2;
        let sym = random_poly(&mut g, n, 3, 3).symmetrize();
        let other = random_poly(&mut g, n, 6, 3).add(&ExactPoly::vandermonde(n));
        let v = if trial % 4 < 2 {
            symmetric_derivative_test(&sym, &other, n, &budget)?
        } else {
            symmetric_derivative_test(&other, &sym, n, &budget)?
        };
        if !v.is_zero() || !sym.is_symmetric() {
            bad.push(format!("trial {trial}: value {v}"));
        }
    }
    let mut positives = Vec::new();
    for n in 2..=4 {
        let v = ExactPoly::vandermonde(n);
        let val = symmetric_derivative_test(&v, &v, n, &budget)?;
        let self_pair = vandermonde_self_pairing(n);
        let positive = val.conj() == val && val.to_c64().re > 0.0;
        if !positive || val != &self_pair * &self_pair {
            bad.push(format!("N={n}: (V,V) gives {val}"));
        }
        positives.push(format!("N={n}: {self_pair}"));
    }
    let two = vandermonde_self_pairing(2) == ExactComplex::from_integer(2);
    if !two {
        bad.push("V(D)V(Z) at N=2 is not 2".into());
    }
    Ok((
        bad.is_empty(),
        summarize(
            &format!(
                "20 symmetric pairs vanish; V(D)V(Z) {}",
                positives.join(", ")
            ),
            &bad,
        ),
    ))
}

fn recovery_round_trip(opts: &SuiteOptions) -> Result<(bool, String)> {
    let sampler = PointSampler::default();
    let n = 24;
    let disk = BasisFamily::disk(n);
    let mut bad = Vec::new();
    let (mut worst_pt, mut worst_c): (f64, f64) = (0.0, 0.0);
    for seed in 0..50u64 {
        let mut g = rng(opts.seed ^ (8 << 32) ^ seed);
        let r = 1 + (seed as usize) % 5;
        let truth = sampler.sample(&mut g, r);
        let m = assemble(&point_masses(&truth), &disk, &disk)?;
        let rec = recover_point_masses(&m, 5, &RecoveryOptions::default())?;
        if rec.points.len() != r {
            bad.push(format!(
                "seed {seed}: {} points recovered, {r} expected",
                rec.points.len()
            ));
            continue;
        }
        for (z, c) in &truth {
            let (k, dz) = rec
                .points
                .iter()
                .enumerate()
                .map(|(k, p)| (k, (p - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            let dc = (rec.coefficients[k] - c).norm() / c.norm();
            worst_pt = worst_pt.max(dz);
            worst_c = worst_c.max(dc);
            if dz >= RECOVERY_TOL || dc >= RECOVERY_TOL {
                bad.push(format!(
                    "seed {seed}: point error {dz:.2e}, coefficient error {dc:.2e}"
                ));
            }
        }
    }
    Ok((
        bad.is_empty(),
        summarize(
            &format!("50 seeds, worst point error {worst_pt:.2e}, worst relative coefficient error {worst_c:.2e}"),
            &bad,
        ),
    ))
}

/// `(1 − r²)³₊`: twice continuously differentiable across `r = 1`.
pub fn landau_bump() -> WeightSpec {
    WeightSpec::Radial(RadialDensity::disk(
        RadialProfile::PowerBump {
            radius: 1.0,
            power: 3,
        },
        1.0,
    ))
}

fn landau_sweep(_: &SuiteOptions) -> Result<(bool, String)> {
    let v = landau_bump();
    let mut bad = Vec::new();
    let mut ranks = Vec::new();
    let mut worst_off: f64 = 0.0;
    for q in 0..=2u32 {
        for n in [8, 16, 24] {
            let cfg = LandauConfig::new(2.0, q, n);
            let (m, report) = landau_toeplitz(&v, &cfg, LANDAU_RANK_TOL)?;
            let a = m.to_float();
            let off = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm())
                .fold(0.0, f64::max);
            worst_off = worst_off.max(off);
            ranks.push(format!("q{q}/n{n}:{}", report.rank));
            if 2 * report.rank < n {
                bad.push(format!("q={q}, n={n}: rank {} < {}", report.rank, n / 2));
            }
            if off >= LANDAU_OFF_DIAGONAL {
                bad.push(format!("q={q}, n={n}: off-diagonal {off:.2e}"));
            }
        }
    }
    let bases = (0..=2u32)
        .map(|q| {
            landau_basis(&LandauConfig {
                grid_half_width: Some(LandauConfig::new(2.0, 2, 24).half_width()),
                ..LandauConfig::new(2.0, q, 24)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cross: f64 = 0.0;
    for a in 0..3 {
        for b in a + 1..3 {
            cross = cross.max(cross_gram_max(&bases[a], &bases[b])?);
        }
    }
    if cross >= LANDAU_CROSS_GRAM {
        bad.push(format!("cross-level Gram {cross:.2e}"));
    }
    let summary = format!(
        "ranks {}; off-diagonal {worst_off:.2e}; cross-level Gram {cross:.2e}",
        ranks.join(" ")
    );
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            summary
        } else {
            format!("{}; {summary}", bad.join("; "))
        },
    ))
}

fn projection_fourier(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed ^ 10);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for trial in 0..20 {
        let atoms = g.random_range(1..=6);
        let pts: Vec<(Vec<f64>, C64)> = (0..atoms)
            .map(|_| {
                let x = (0..3).map(|_| g.random_range(-1.0..1.0)).collect();
                (
                    x,
                    C64::new(g.random_range(-2.0..2.0), g.random_range(-2.0..2.0)),
                )
            })
            .collect();
        let mu = WeightSpec::Points(PointDistribution::real_masses(&pts));
        for _ in 0..20 {
            let zeta = unit_vector3(&mut g);
            let t: f64 = g.random_range(-5.0..5.0);
            let proj = project_measure(&mu, &zeta)?;
            let WeightSpec::Points(p) = &proj else {
                bad.push(format!("trial {trial}: projection is not discrete"));
                continue;
            };
            if p.terms.len() > atoms {
                bad.push(format!(
                    "trial {trial}: {} projected atoms from {atoms}",
                    p.terms.len()
                ));
            }
            let lhs = fourier_transform(&proj, &[t])?;
            let xi: Vec<f64> = zeta.iter().map(|z| t * z).collect();
            let rhs = fourier_transform(&mu, &xi)?;
            let d = (lhs - rhs).norm();
            worst = worst.max(d);
            if d >= PROJECTION_TOL {
                bad.push(format!("trial {trial}: deviation {d:.2e}"));
            }
        }
    }
    Ok((
        bad.is_empty(),
        summarize(
            &format!("400 (measure, ζ, t) triples, max deviation {worst:.2e}"),
            &bad,
        ),
    ))
}

fn born_checks(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut g = rng(opts.seed ^ 11);
    let a = 0.7;
    let ball = WeightSpec::Radial(RadialDensity::ball(RadialProfile::constant(1.0), a, 3));
    let mut bad = Vec::new();
    let mut worst_ball: f64 = 0.0;
    for _ in 0..100 {
        let (w, s) = (unit_vector3(&mut g), unit_vector3(&mut g));
        let q = w
            .iter()
            .zip(&s)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        let k = born_kernel(&ball, &w, &s)?;
        let d = (k - C64::new(ball_indicator_transform(a, q), 0.0)).norm();
        worst_ball = worst_ball.max(d);
    }
    if worst_ball >= BORN_BALL_TOL {
        bad.push(format!("ball kernel deviation {worst_ball:.2e}"));
    }

    let bump = WeightSpec::Radial(RadialDensity::ball(
        RadialProfile::PowerBump {
            radius: 0.8,
            power: 3,
        },
        0.8,
        3,
    ));
    let mut worst_chord: f64 = 0.0;
    for _ in 0..50 {
        let (w, s) = (unit_vector3(&mut g), unit_vector3(&mut g));
        let rot = rotation_from_quaternion(random_quaternion(&mut g));
        let k1 = born_kernel(&bump, &w, &s)?;
        let k2 = born_kernel(&bump, &rotate(&rot, &w), &rotate(&rot, &s))?;
        worst_chord = worst_chord.max((k1 - k2).norm());
    }
    if worst_chord >= BORN_CHORD_TOL {
        bad.push(format!("chordal dependence deviation {worst_chord:.2e}"));
    }

    let mut ranks = Vec::new();
    for n in (6..=24).step_by(2) {
        let (_, report) = born_matrix(&bump, &SphereSampling::fibonacci(n)?, RANK_TOL)?;
        ranks.push(report.rank);
    }
    let monotone = ranks.windows(2).all(|w| w[1] >= w[0]) && ranks.last() > ranks.first();
    if !monotone {
        bad.push(format!("Born ranks {ranks:?} not increasing"));
    }
    let summary = format!(
        "ball {worst_ball:.2e}, rotation {worst_chord:.2e}, ranks over sizes 6..24: {ranks:?}"
    );
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            summary
        } else {
            format!("{}; {summary}", bad.join("; "))
        },
    ))
}

/// The three weights of the two-path comparison.
pub fn helmholtz_weights() -> Vec<(&'static str, WeightSpec)> {
    let points = PointDistribution::real_masses(&[
        (vec![0.3, -0.2, 0.1], C64::new(1.0, 0.5)),
        (vec![-0.4, 0.25, 0.3], C64::new(-0.7, 0.0)),
        (vec![0.1, 0.05, -0.45], C64::new(0.2, -1.1)),
    ]);
    let ball = RadialDensity::ball(RadialProfile::constant(1.0), 0.5, 3)
        .with_center(vec![0.1, -0.2, 0.15]);
    let h = 0.05;
    let grid = GridDensity::sample(vec![-0.6; 3], vec![h; 3], vec![24; 3], |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        C64::new((-6.0 * r2).exp() * (1.0 + x[1]), 0.3 * x[2])
    });
    vec![
        ("points", WeightSpec::Points(points)),
        ("ball", WeightSpec::Radial(ball)),
        ("grid", WeightSpec::Grid(grid)),
    ]
}

fn helmholtz_paths(_: &SuiteOptions) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut passed = true;
    for (name, w) in helmholtz_weights() {
        let r = helmholtz_two_path(&w, harmonic_count(4), TransformQuadrature::default())?;
        passed &= r.max_deviation < HELMHOLTZ_TOL;
        parts.push(format!("{name} {:.2e}", r.max_deviation));
    }
    Ok((
        passed,
        format!("harmonic degree <= 4, deviations: {}", parts.join(", ")),
    ))
}
