//! Landau levels in the symmetric gauge and the Toeplitz operators `T_q(V) = P_q V`.
//!
//! Level-`q` functions are `P(z, z̄) e^{−B|z|²/4}`, built symbolically as
//! `Q̄^q (z^s e^{−B|z|²/4})` followed by Gram–Schmidt under the exact Gaussian
//! inner product `∫ z^a z̄^b e^{−B|z|²/2} dA = δ_ab π a! (2/B)^{a+1}`.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_with, AssemblyOptions, ToeplitzMatrix};
use crate::bases::{BasisFamily, BasisSpec};
use crate::error::{Error, Result};
use crate::func::{Func, ZPoly};
use crate::numeric::{factorial, is_hermitian, MultiIndex, SpectrumReport, C64};
use crate::weights::{GridDensity, Measure, WeightSpec};

/// Which first-order operator the creation operator `Q̄ = (2i)⁻¹(∂ + m)` is built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CreationConvention {
    /// `∂ = ∂x − i∂y`, `m = −(B/2) z̄`: the adjoint of the operator annihilating the lowest level.
    #[default]
    Symmetric,
    /// `∂ = ∂x − i∂y`, `m = (B/2)(y − i x)`.
    LiteralHolomorphic,
    /// `∂ = ∂x + i∂y`, `m = (B/2)(y − i x)`.
    LiteralAntiholomorphic,
}

/// `Λ_q = (2q+1) B`.
pub fn landau_level(b: f64, q: u32) -> f64 {
    f64::from(2 * q + 1) * b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauConfig {
    pub b: f64,
    pub q: u32,
    /// Truncation: number of level functions.
    pub n: usize,
    #[serde(default)]
    pub convention: CreationConvention,
    /// Grid points per axis for gridded representations.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Overrides the automatic grid half-width, so several levels can share one grid.
    #[serde(default)]
    pub grid_half_width: Option<f64>,
}

fn default_grid_points() -> usize {
    128
}

impl LandauConfig {
    pub fn new(b: f64, q: u32, n: usize) -> Self {
        Self {
            b,
            q,
            n,
            convention: CreationConvention::Symmetric,
            grid_points: default_grid_points(),
            grid_half_width: None,
        }
    }

    pub fn level(&self) -> f64 {
        landau_level(self.b, self.q)
    }

    /// Half-width `L` of the square `[−L, L]²` beyond which every level function is below `1e-14`.
    pub fn half_width(&self) -> f64 {
        if let Some(l) = self.grid_half_width {
            return l;
        }
        (8.0 * (35.0 + self.n as f64 + f64::from(self.q)) / self.b)
            .sqrt()
            .max(2.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "field strength {} must be positive",
                self.b
            )));
        }
        if let Some(l) = self.grid_half_width {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "grid half-width {l} must be positive"
                )));
            }
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument(
                "truncation must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `Q̄` on the polynomial part `P` of `P e^{−B|z|²/4}`.
pub fn creation_poly(p: &ZPoly, b: f64, convention: CreationConvention) -> ZPoly {
    let one = MultiIndex::scalar(1);
    let zero = MultiIndex::scalar(0);
    let half = C64::new(b / 2.0, 0.0);
    // 2∂_z(P e) = (2∂P − (B/2) z̄ P) e, 2∂_z̄(P e) = (2∂̄P − (B/2) z P) e
    let deriv = match convention {
        CreationConvention::Symmetric | CreationConvention::LiteralHolomorphic => p
            .wirtinger(&one, &zero)
            .scale(C64::new(2.0, 0.0))
            .add(&p.mul_coordinate(0, true).scale(-half)),
        CreationConvention::LiteralAntiholomorphic => p
            .wirtinger(&zero, &one)
            .scale(C64::new(2.0, 0.0))
            .add(&p.mul_coordinate(0, false).scale(-half)),
    };
    let mult = match convention {
        CreationConvention::Symmetric => p.mul_coordinate(0, true).scale(-half),
        // (B/2)(y − i x) = −i (B/2) z
        _ => p.mul_coordinate(0, false).scale(-half * C64::new(0.0, 1.0)),
    };
    deriv.add(&mult).scale(C64::new(0.0, -0.5))
}

/// `∫ P conj(Q) e^{−κ|z|²} dA`.
pub fn gaussian_inner(p: &ZPoly, q: &ZPoly, kappa: f64) -> C64 {
    let prod = p.mul(&q.conj());
    let mut acc = C64::new(0.0, 0.0);
    for (a, b, c) in prod.terms() {
        if a == b {
            let m = a.get(0);
            acc += c * (PI * factorial(m) / kappa.powi(m as i32 + 1));
        }
    }
    acc
}

/// Polynomial parts of an orthonormal basis of the level-`q` functions built from `z^s`, `s < n`.
pub fn landau_polynomials(
    b: f64,
    q: u32,
    n: usize,
    convention: CreationConvention,
) -> Result<Vec<ZPoly>> {
    LandauConfig {
        convention,
        ..LandauConfig::new(b, q, n)
    }
    .validate()?;
    let kappa = b / 2.0;
    let mut out: Vec<ZPoly> = Vec::with_capacity(n);
    for s in 0..n as u32 {
        let mut v = ZPoly::monomial(
            &MultiIndex::scalar(s),
            &MultiIndex::scalar(0),
            C64::new(1.0, 0.0),
        );
        for _ in 0..q {
            v = creation_poly(&v, b, convention);
        }
        let before = gaussian_inner(&v, &v, kappa).re.sqrt();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for u in &out {
                let c = gaussian_inner(&v, u, kappa);
                v = v.add(&u.scale(-c));
            }
        }
        let norm = gaussian_inner(&v, &v, kappa).re.max(0.0).sqrt();
        if !(norm > 1e-10 * before) {
            return Err(Error::GramSchmidtBreakdown {
                index: s as usize,
                residual: if before > 0.0 { norm / before } else { 0.0 },
            });
        }
        out.push(v.scale(C64::new(1.0 / norm, 0.0)));
    }
    Ok(out)
}

/// Orthonormal level-`q` functions `P_s e^{−B|z|²/4}` (Lebesgue measure).
pub fn landau_functions(
    b: f64,
    q: u32,
    n: usize,
    convention: CreationConvention,
) -> Result<Vec<Func>> {
    Ok(landau_polynomials(b, q, n, convention)?
        .into_iter()
        .map(|poly| Func::ZGauss { poly, c: b / 4.0 })
        .collect())
}

/// Samples on the periodic grid `x_i = −L + i h`, `h = 2L/n`, stored with `x` fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub half_width: f64,
    pub points: usize,
    pub values: Vec<C64>,
}

impl GridFunction {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn sample(f: &Func, half_width: f64, points: usize) -> Self {
        let mut g = Self {
            half_width,
            points,
            values: Vec::with_capacity(points * points),
        };
        for iy in 0..points {
            for ix in 0..points {
                let x = [g.coord(ix), g.coord(iy)];
                g.values.push(f.value(&x));
            }
        }
        g
    }

    /// `h² Σ u conj(v)`.
    pub fn inner(&self, other: &Self) -> C64 {
        let h = self.spacing();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u * v.conj())
            .sum::<C64>()
            * (h * h)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    pub fn axpy(&self, a: C64, other: &Self) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| u + a * v)
                .collect(),
            ..self.clone()
        }
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.points == other.points && self.half_width == other.half_width
    }
}

fn fft2(values: &mut [C64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in values.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![C64::new(0.0, 0.0); n];
    for ix in 0..n {
        for iy in 0..n {
            col[iy] = values[iy * n + ix];
        }
        fft.process(&mut col);
        for iy in 0..n {
            values[iy * n + ix] = col[iy];
        }
    }
    if inverse {
        let s = 1.0 / (n * n) as f64;
        for v in values.iter_mut() {
            *v *= s;
        }
    }
}

/// Signed wavenumber of FFT bin `m`; the Nyquist bin maps to 0.
fn wavenumber(m: usize, n: usize, half_width: f64) -> f64 {
    let k0 = PI / half_width;
    if 2 * m == n {
        0.0
    } else if 2 * m < n {
        m as f64 * k0
    } else {
        (m as f64 - n as f64) * k0
    }
}

/// `Q̄u` by spectral differentiation on the grid.
///
/// Fails when `u` has non-negligible energy near the grid's Nyquist band or on the boundary.
pub fn creation_apply(
    u: &GridFunction,
    b: f64,
    convention: CreationConvention,
) -> Result<GridFunction> {
    let n = u.points;
    if n < 8 || u.values.len() != n * n {
        return Err(Error::GridTooCoarse(format!("grid of {n} points per axis")));
    }
    let peak = u.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = (0..n)
        .flat_map(|i| {
            [
                u.values[i],
                u.values[(n - 1) * n + i],
                u.values[i * n],
                u.values[i * n + n - 1],
            ]
        })
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if peak > 0.0 && edge > 1e-10 * peak {
        return Err(Error::GridTooCoarse(
            "function does not decay at the grid boundary".into(),
        ));
    }
    let mut spec = u.values.clone();
    fft2(&mut spec, n, false);
    let top = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let band = (0..n * n)
        .filter(|&i| {
            let (mx, my) = (i % n, i / n);
            let f = |m: usize| m.min(n - m);
            f(mx).max(f(my)) * 8 >= 3 * n
        })
        .map(|i| spec[i].norm())
        .fold(0.0, f64::max);
    if top > 0.0 && band > 1e-10 * top {
        return Err(Error::GridTooCoarse(format!(
            "derivative residual {:e} above 1e-10",
            band / top
        )));
    }
    let sign = match convention {
        CreationConvention::LiteralAntiholomorphic => 1.0,
        _ => -1.0,
    };
    for i in 0..n * n {
        let (kx, ky) = (
            wavenumber(i % n, n, u.half_width),
            wavenumber(i / n, n, u.half_width),
        );
        // (∂x ± i∂y) → i kx ∓ ky
        spec[i] *= C64::new(-sign * ky, kx);
    }
    fft2(&mut spec, n, true);
    let half = b / 2.0;
    let mut out = u.clone();
    for iy in 0..n {
        for ix in 0..n {
            let (x, y) = (u.coord(ix), u.coord(iy));
            let m = match convention {
                CreationConvention::Symmetric => -half * C64::new(x, -y),
                _ => half * C64::new(y, -x),
            };
            let i = iy * n + ix;
            out.values[i] = (spec[i] + m * u.values[i]) * C64::new(0.0, -0.5);
        }
    }
    Ok(out)
}

/// Level-`q` basis sampled on the configuration grid.
pub fn landau_basis(cfg: &LandauConfig) -> Result<Vec<GridFunction>> {
    cfg.validate()?;
    let l = cfg.half_width();
    Ok(landau_functions(cfg.b, cfg.q, cfg.n, cfg.convention)?
        .iter()
        .map(|f| GridFunction::sample(f, l, cfg.grid_points))
        .collect())
}

/// Gram–Schmidt of gridded functions under the grid inner product.
pub fn grid_gram_schmidt(fs: &[GridFunction]) -> Result<Vec<GridFunction>> {
    let mut out: Vec<GridFunction> = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        if out.first().is_some_and(|g| !g.same_grid(f)) {
            return Err(Error::DimensionMismatch {
                expected: out[0].points,
                found: f.points,
            });
        }
        let before = f.norm();
        let mut v = f.clone();
        for _ in 0..2 {
            for u in &out {
                v = v.axpy(-v.inner(u), u);
            }
        }
        let norm = v.norm();
        if !(norm > 1e-10 * before) {
            return Err(Error::GramSchmidtBreakdown {
                index: i,
                residual: if before > 0.0 { norm / before } else { 0.0 },
            });
        }
        out.push(v.scale(C64::new(1.0 / norm, 0.0)));
    }
    Ok(out)
}

/// Largest `|⟨u_i, v_j⟩|` over two families.
pub fn cross_gram_max(a: &[GridFunction], b: &[GridFunction]) -> Result<f64> {
    let mut all = a.iter().chain(b);
    if let Some(first) = all.next() {
        if let Some(u) = all.find(|u| !u.same_grid(first)) {
            return Err(Error::GridMismatch(format!(
                "{} points on [-{}, {}] against {} points on [-{}, {}]",
                first.points,
                first.half_width,
                first.half_width,
                u.points,
                u.half_width,
                u.half_width
            )));
        }
    }
    Ok(a.iter()
        .flat_map(|u| b.iter().map(move |v| u.inner(v).norm()))
        .fold(0.0, f64::max))
}

/// `V` re-expressed against Lebesgue area, as `T_q(V)` requires.
fn lebesgue(v: &WeightSpec) -> WeightSpec {
    match v {
        WeightSpec::Radial(r) if r.measure.is_none() && r.dim == 2 => {
            WeightSpec::Radial(r.clone().with_measure(Measure::Lebesgue))
        }
        other => other.clone(),
    }
}

/// Matrix `(V x_s, x_t)` over the level-`q` basis with its spectrum.
pub fn landau_toeplitz(
    v: &WeightSpec,
    cfg: &LandauConfig,
    rel_tol: f64,
) -> Result<(ToeplitzMatrix, SpectrumReport)> {
    cfg.validate()?;
    if let WeightSpec::Polynomial(_) = v {
        return Err(Error::InvalidWeight(
            "polynomial densities use the normalized disk measure".into(),
        ));
    }
    let v = lebesgue(v);
    if v.extent() > cfg.half_width() {
        return Err(Error::SupportMismatch(
            "potential support escapes the grid".into(),
        ));
    }
    let basis = BasisFamily::new(
        BasisSpec::Landau {
            b: cfg.b,
            q: cfg.q,
            convention: cfg.convention,
        },
        cfg.n,
    )?;
    let m = assemble_with(&v, &basis, &basis, AssemblyOptions::float())?;
    let a = m.to_float();
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let herm = is_hermitian(&a, 1e-12 * scale.max(f64::MIN_POSITIVE));
    let report = SpectrumReport::new(&a, rel_tol, herm)?;
    Ok((m, report))
}

/// 5-point Laplacian with zero extension, at stencil step `step` cells.
fn grid_laplacian(g: &GridDensity, values: &[C64], step: usize) -> Vec<C64> {
    let (nx, ny) = (g.shape[0], g.shape[1]);
    let (hx, hy) = (g.spacing[0] * step as f64, g.spacing[1] * step as f64);
    let at = |i: isize, j: isize| -> C64 {
        if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
            C64::new(0.0, 0.0)
        } else {
            values[i as usize * ny + j as usize]
        }
    };
    let s = step as isize;
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    for i in 0..nx as isize {
        for j in 0..ny as isize {
            let c = at(i, j);
            out[i as usize * ny + j as usize] = (at(i + s, j) + at(i - s, j) - 2.0 * c) / (hx * hx)
                + (at(i, j + s) + at(i, j - s) - 2.0 * c) / (hy * hy);
        }
    }
    out
}

/// `W = Σ_m c_m Δ^m V` by the iterated 5-point Laplacian.
///
/// Each power is checked against the same stencil at twice the step; a relative
/// discrepancy above 0.25 means `V` is not smooth at grid scale.
pub fn dq_transform(v: &GridDensity, coeffs: &[f64]) -> Result<GridDensity> {
    if v.dim() != 2 {
        return Err(Error::InvalidWeight(
            "the Laplacian transform needs a planar grid".into(),
        ));
    }
    WeightSpec::Grid(v.clone()).validate()?;
    let mut power = v.values.clone();
    let mut acc: Vec<C64> = power
        .iter()
        .map(|x| x * coeffs.first().copied().unwrap_or(0.0))
        .collect();
    for (m, &c) in coeffs.iter().enumerate().skip(1) {
        let fine = grid_laplacian(v, &power, 1);
        let coarse = grid_laplacian(v, &power, 2);
        let norm = fine.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let diff = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 && diff > 0.25 * norm {
            return Err(Error::GridTooCoarse(format!(
                "Laplacian power {m} not resolved (relative stencil discrepancy {:.3})",
                diff / norm
            )));
        }
        power = fine;
        for (a, p) in acc.iter_mut().zip(&power) {
            *a += c * p;
        }
    }
    Ok(GridDensity {
        values: acc,
        ..v.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_level_is_normalized_monomials() {
        let b = 2.0;
        let ps = landau_polynomials(b, 0, 5, CreationConvention::Symmetric).unwrap();
        for (s, p) in ps.iter().enumerate() {
            assert_eq!(p.terms().count(), 1);
            let (a, _, c) = p.terms().next().unwrap();
            assert_eq!(a.get(0), s as u32);
            assert!(
                (c.norm_sqr() * PI * factorial(s as u32) * (2.0 / b).powi(s as i32 + 1) - 1.0)
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn levels_are_orthogonal() {
        let b = 2.0;
        let l0 = landau_polynomials(b, 0, 6, CreationConvention::Symmetric).unwrap();
        let l1 = landau_polynomials(b, 1, 6, CreationConvention::Symmetric).unwrap();
        let l2 = landau_polynomials(b, 2, 6, CreationConvention::Symmetric).unwrap();
        for u in &l0 {
            for v in l1.iter().chain(&l2) {
                assert!(gaussian_inner(u, v, b / 2.0).norm() < 1e-12);
            }
        }
        for u in &l1 {
            for v in &l2 {
                assert!(gaussian_inner(u, v, b / 2.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_creation_matches_symbolic() {
        let cfg = LandauConfig::new(2.0, 0, 3);
        let l = cfg.half_width();
        let x0 = landau_functions(2.0, 0, 3, CreationConvention::Symmetric).unwrap();
        for f in &x0 {
            let Func::ZGauss { poly, c } = f else {
                panic!()
            };
            let g = GridFunction::sample(f, l, 128);
            let num = creation_apply(&g, 2.0, CreationConvention::Symmetric).unwrap();
            let sym = GridFunction::sample(
                &Func::ZGauss {
                    poly: creation_poly(poly, 2.0, CreationConvention::Symmetric),
                    c: *c,
                },
                l,
                128,
            );
            let err = num.axpy(C64::new(-1.0, 0.0), &sym).norm();
            assert!(err < 1e-10 * sym.norm(), "{err}");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let f = Func::ZGauss {
            poly: ZPoly::constant(1, C64::new(1.0, 0.0)),
            c: 40.0,
        };
        let g = GridFunction::sample(&f, 3.0, 16);
        assert!(matches!(
            creation_apply(&g, 2.0, CreationConvention::Symmetric),
            Err(Error::GridTooCoarse(_))
        ));
    }

    #[test]
    fn dq_identity_and_laplacian() {
        let n = 201;
        let h = 8.0 / n as f64;
        let g = GridDensity::sample(vec![-4.0, -4.0], vec![h, h], vec![n, n], |x| {
            C64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        });
        assert_eq!(dq_transform(&g, &[1.0]).unwrap().values, g.values);
        let w = dq_transform(&g, &[0.0, 1.0]).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..g.len() {
            let x = g.center(i);
            let r2 = x[0] * x[0] + x[1] * x[1];
            err = err.max((w.values[i].re - (4.0 * r2 - 4.0) * (-r2).exp()).abs());
        }
        assert!(err < 5e-3, "{err}");
    }
}
