//! Matrices of Toeplitz forms on Helmholtz functions `e^{∓ix₁} h(x′)` in `R³`.
//!
//! `h` runs over planar harmonics in `x′ = (x₂, x₃)`. The product `f_j ḡ_k` is
//! `e^{−2ix₁} h_j h̄_k`, so the matrix equals the harmonic matrix of the partial
//! Fourier transform `F̃(x′) = ∫ F(x₁, x′) e^{−2ix₁} dx₁`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_functions, assemble_with, AssemblyOptions, ToeplitzMatrix};
use crate::bases::{BasisFamily, BasisSpec};
use crate::error::{Error, Result};
use crate::func::Func;
use crate::numeric::{
    composite_gauss_legendre, cpow, max_abs_diff, periodic_trapezoid, MultiIndex, C64,
};
use crate::weights::{Location, PointDistribution, RadialDensity, WeightSpec};

/// Spatial frequency of `e^{−2ix₁}`.
const FREQ: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformQuadrature {
    /// Gauss–Legendre nodes per piece along the chord in `x₁`.
    pub chord_nodes: usize,
    /// Gauss–Legendre nodes per piece in the polar angle of `ρ = R sin φ`.
    pub radial_nodes: usize,
}

impl Default for TransformQuadrature {
    fn default() -> Self {
        Self {
            chord_nodes: 40,
            radial_nodes: 48,
        }
    }
}

fn harmonic_family(size: usize, ambient: usize) -> Result<BasisFamily> {
    let slots = if ambient == 3 { [1, 2] } else { [0, 1] };
    BasisFamily::new(BasisSpec::Harmonic2 { ambient, slots }, size)
}

fn weight_dim(f: &WeightSpec) -> Option<usize> {
    match f {
        WeightSpec::Points(p) => p.terms.first().map(|t| t.at.real_dim()),
        WeightSpec::Radial(r) => Some(r.dim),
        WeightSpec::Grid(g) => Some(g.dim()),
        WeightSpec::Polynomial(_) => Some(2),
    }
}

fn check_weight(f: &WeightSpec) -> Result<()> {
    f.validate()?;
    match weight_dim(f) {
        Some(3) | None => Ok(()),
        Some(d) => Err(Error::DimensionMismatch {
            expected: 3,
            found: d,
        }),
    }
}

/// Direct path: `⟨F, e^{−ix₁}h_j · conj(e^{ix₁}h_k)⟩` with the weight's own quadrature.
pub fn helmholtz_direct(f: &WeightSpec, size: usize) -> Result<ToeplitzMatrix> {
    check_weight(f)?;
    let h = harmonic_family(size, 3)?;
    let wave = |k: f64, g: &Func| -> Func {
        let Func::X(poly) = g else {
            unreachable!("planar harmonics are real polynomials")
        };
        Func::Wave {
            k: vec![k, 0.0, 0.0],
            poly: poly.clone(),
        }
    };
    let rows: Vec<Func> = h.members().iter().map(|g| wave(-1.0, g)).collect();
    let cols: Vec<Func> = h.members().iter().map(|g| wave(1.0, g)).collect();
    let m = assemble_functions(f, &rows, &cols, 1)?;
    let mut out = ToeplitzMatrix::from_float(m);
    out.row_labels = h.labels().to_vec();
    out.col_labels = h.labels().to_vec();
    out.weight = Some(std::sync::Arc::new(f.clone()));
    Ok(out)
}

/// `F̃` as a discrete weight on the plane `x′`.
pub fn partial_fourier_weight(f: &WeightSpec, quad: TransformQuadrature) -> Result<WeightSpec> {
    check_weight(f)?;
    let mut out = PointDistribution::new();
    match f {
        WeightSpec::Points(p) => {
            for t in &p.terms {
                let Location::Real(x) = &t.at else {
                    return Err(Error::InvalidWeight(
                        "Helmholtz weights need real locations".into(),
                    ));
                };
                let a = t.holo.padded(3).unwrap_or_else(|| t.holo.clone());
                // ∂^{a₁} e^{−2ix₁} at x₁
                let c = t.coeff
                    * cpow(C64::new(0.0, -FREQ), a.get(0))
                    * C64::from_polar(1.0, -FREQ * x[0]);
                out = out.with_term(
                    Location::Real(vec![x[1], x[2]]),
                    c,
                    MultiIndex::new(vec![a.get(1), a.get(2)]),
                    MultiIndex::zeros(2),
                );
            }
        }
        WeightSpec::Radial(r) => out = radial_transform(r, quad)?,
        WeightSpec::Grid(g) => {
            let (nx, ny, nz) = (g.shape[0], g.shape[1], g.shape[2]);
            if FREQ * g.spacing[0] > std::f64::consts::FRAC_PI_4 {
                return Err(Error::GridTooCoarse(format!(
                    "spacing {} in x₁ aliases frequency {FREQ}",
                    g.spacing[0]
                )));
            }
            let m = g.cell_measure();
            for j in 0..ny {
                for k in 0..nz {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..nx {
                        let flat = g.flat_index(&[i, j, k]);
                        let x1 = g.center(flat)[0];
                        acc += g.values[flat] * C64::from_polar(m, -FREQ * x1);
                    }
                    if acc != C64::new(0.0, 0.0) {
                        let c = g.center(g.flat_index(&[0, j, k]));
                        out = out.with_mass(Location::Real(vec![c[1], c[2]]), acc);
                    }
                }
            }
        }
        WeightSpec::Polynomial(_) => {
            return Err(Error::InvalidWeight(
                "polynomial densities are planar".into(),
            ))
        }
    }
    Ok(WeightSpec::Points(out))
}

/// Chord integrals through a ball, sampled on `ρ = R sin φ` so the chord half-length `R cos φ` is smooth.
fn radial_transform(r: &RadialDensity, quad: TransformQuadrature) -> Result<PointDistribution> {
    let big_r = r.support_radius;
    let c = r.center();
    let mut breaks: Vec<f64> = r
        .profile
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < big_r)
        .collect();
    breaks.sort_by(f64::total_cmp);
    let mut phi_breaks = vec![0.0];
    phi_breaks.extend(breaks.iter().map(|b| (b / big_r).asin()));
    phi_breaks.push(FRAC_PI_2);
    let phi_rule = composite_gauss_legendre(quad.radial_nodes, &phi_breaks)?;
    let theta = periodic_trapezoid(quad.radial_nodes)?;
    let mut out = PointDistribution::new();
    for (phi, wphi) in phi_rule.pairs() {
        let rho = big_r * phi.sin();
        let s = big_r * phi.cos();
        // chord t ∈ [−s, s], split where it crosses a profile break sphere
        let mut tb = vec![-s, s];
        for b in &breaks {
            if *b > rho {
                let u = (b * b - rho * rho).sqrt();
                tb.extend([-u, u]);
            }
        }
        tb.sort_by(f64::total_cmp);
        tb.dedup();
        let chord = composite_gauss_legendre(quad.chord_nodes, &tb)?;
        let mut ft = C64::new(0.0, 0.0);
        for (t, wt) in chord.pairs() {
            let rr = (rho * rho + t * t).sqrt();
            ft += C64::from_polar(wt * r.profile.value(rr), -FREQ * (c[0] + t));
        }
        let ft = r.coeff * ft * (big_r * big_r * phi.sin() * phi.cos() * wphi);
        for (th, wth) in theta.pairs() {
            out = out.with_mass(
                Location::Real(vec![c[1] + rho * th.cos(), c[2] + rho * th.sin()]),
                ft * wth,
            );
        }
    }
    Ok(out)
}

/// Transform path: the harmonic matrix of `F̃`.
pub fn helmholtz_matrix(
    f: &WeightSpec,
    size: usize,
    quad: TransformQuadrature,
) -> Result<ToeplitzMatrix> {
    let ft = partial_fourier_weight(f, quad)?;
    let h = harmonic_family(size, 2)?;
    let mut m = assemble_with(&ft, &h, &h, AssemblyOptions::float())?;
    m.weight = Some(std::sync::Arc::new(f.clone()));
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct TwoPathReport {
    pub direct: ToeplitzMatrix,
    pub transformed: ToeplitzMatrix,
    pub max_deviation: f64,
}

pub fn helmholtz_two_path(
    f: &WeightSpec,
    size: usize,
    quad: TransformQuadrature,
) -> Result<TwoPathReport> {
    let direct = helmholtz_direct(f, size)?;
    let transformed = helmholtz_matrix(f, size, quad)?;
    let max_deviation = max_abs_diff(&direct.to_float(), &transformed.to_float());
    Ok(TwoPathReport {
        direct,
        transformed,
        max_deviation,
    })
}

/// Number of planar harmonics of degree at most `l`.
pub fn harmonic_count(l: u32) -> usize {
    2 * l as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::numerical_rank;
    use crate::weights::RadialProfile;

    #[test]
    fn point_on_plane_gives_rank_one() {
        let f = WeightSpec::Points(PointDistribution::real_masses(&[(
            vec![0.0, 0.3, -0.2],
            C64::new(1.0, 0.0),
        )]));
        let m = helmholtz_direct(&f, harmonic_count(3)).unwrap();
        assert_eq!(numerical_rank(&m.to_float(), 1e-10).unwrap(), 1);
    }

    #[test]
    fn even_weight_gives_real_entries() {
        let f = WeightSpec::Radial(RadialDensity::ball(
            RadialProfile::PowerBump {
                radius: 0.9,
                power: 3,
            },
            0.9,
            3,
        ));
        let m = helmholtz_matrix(&f, harmonic_count(3), TransformQuadrature::default()).unwrap();
        assert!(m.to_float().iter().all(|v| v.im.abs() < 1e-14));
    }

    #[test]
    fn two_paths_agree_on_ball() {
        let f = WeightSpec::Radial(
            RadialDensity::ball(RadialProfile::constant(1.0), 0.5, 3)
                .with_center(vec![0.1, -0.2, 0.15]),
        );
        let r = helmholtz_two_path(&f, harmonic_count(4), TransformQuadrature::default()).unwrap();
        assert!(r.max_deviation < 1e-8, "{}", r.max_deviation);
    }
}
