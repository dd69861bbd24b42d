//! Evaluable test functions: polynomials in `(z, z̄)` or in real coordinates,
//! Gaussian-weighted polynomials, and plane waves times polynomials.
//!
//! Points are always passed as real coordinate slices. A complex coordinate
//! `z_j` occupies slots `2j` (real part) and `2j + 1` (imaginary part).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{binomial, cpow, falling_factorial, rpow, MultiIndex, C64, I};

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Sparse polynomial `Σ c_{αβ} z^α z̄^β` on `C^d`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ZPoly {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), C64>,
}

impl ZPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zeros(dim), MultiIndex::zeros(dim), c);
        p
    }

    pub fn monomial(alpha: &MultiIndex, beta: &MultiIndex, c: C64) -> Self {
        let dim = alpha.dim().max(beta.dim()).max(1);
        let mut p = Self::zero(dim);
        p.add_term(alpha.padded(dim).unwrap(), beta.padded(dim).unwrap(), c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &C64)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: C64) {
        if c == zero() {
            return;
        }
        let key = (
            alpha.padded(self.dim).expect("index dimension"),
            beta.padded(self.dim).expect("index dimension"),
        );
        let e = self.terms.entry(key).or_insert(zero());
        *e += c;
        if *e == zero() {
            let key = (
                alpha.padded(self.dim).unwrap(),
                beta.padded(self.dim).unwrap(),
            );
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.dim = self.dim.max(other.dim);
        out.terms = self
            .terms
            .iter()
            .map(|((a, b), c)| ((a.padded(out.dim).unwrap(), b.padded(out.dim).unwrap()), *c))
            .collect();
        for (a, b, c) in other.terms() {
            out.add_term(a.clone(), b.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, b, c) in self.terms() {
            out.add_term(a.clone(), b.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let dim = self.dim.max(other.dim);
        let mut out = Self::zero(dim);
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in other.terms() {
                out.add_term(a1.add(a2), b1.add(b2), c1 * c2);
            }
        }
        out
    }

    /// Pointwise complex conjugate: `conj(z^α z̄^β) = z^β z̄^α`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, b, c) in self.terms() {
            out.add_term(b.clone(), a.clone(), c.conj());
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms()
            .map(|(a, b, _)| a.order() + b.order())
            .max()
            .unwrap_or(0)
    }

    pub fn eval_complex(&self, z: &[C64]) -> C64 {
        self.terms()
            .map(|(a, b, c)| {
                let mut v = *c;
                for j in 0..self.dim {
                    let zj = z.get(j).copied().unwrap_or_default();
                    v *= cpow(zj, a.get(j)) * cpow(zj.conj(), b.get(j));
                }
                v
            })
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.eval_complex(&to_complex(x, self.dim))
    }

    /// `∂^a ∂̄^b` as a polynomial.
    pub fn wirtinger(&self, a: &MultiIndex, b: &MultiIndex) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, beta, c) in self.terms() {
            let (Some(na), Some(nb)) = (alpha.checked_sub(a), beta.checked_sub(b)) else {
                continue;
            };
            let mut f = 1.0;
            for j in 0..self.dim {
                f *= falling_factorial(alpha.get(j), a.get(j))
                    * falling_factorial(beta.get(j), b.get(j));
            }
            out.add_term(na, nb, c * f);
        }
        out
    }

    /// Multiplies by `z_j` (`bar = false`) or `z̄_j` (`bar = true`).
    pub fn mul_coordinate(&self, j: usize, bar: bool) -> Self {
        let u = MultiIndex::unit(self.dim, j);
        let z = MultiIndex::zeros(self.dim);
        let m = if bar {
            Self::monomial(&z, &u, C64::new(1.0, 0.0))
        } else {
            Self::monomial(&u, &z, C64::new(1.0, 0.0))
        };
        self.mul(&m)
    }
}

pub fn to_complex(x: &[f64], dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|j| {
            C64::new(
                x.get(2 * j).copied().unwrap_or(0.0),
                x.get(2 * j + 1).copied().unwrap_or(0.0),
            )
        })
        .collect()
}

pub fn to_real(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

/// Sparse polynomial `Σ c_α x^α` on `R^d` with complex coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct XPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl XPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zeros(dim), c);
        p
    }

    pub fn monomial(alpha: &MultiIndex, c: C64) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha.clone(), c);
        p
    }

    /// The coordinate function `x_j` on `R^dim`.
    pub fn coordinate(dim: usize, j: usize) -> Self {
        Self::monomial(&MultiIndex::unit(dim, j), C64::new(1.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: C64) {
        if c == zero() {
            return;
        }
        let key = alpha.padded(self.dim).expect("index dimension");
        let e = self.terms.entry(key.clone()).or_insert(zero());
        *e += c;
        if *e == zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let dim = self.dim.max(other.dim);
        let mut out = Self::zero(dim);
        for (a, c) in self.terms().chain(other.terms()) {
            out.add_term(a.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in self.terms() {
            out.add_term(a.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let dim = self.dim.max(other.dim);
        let mut out = Self::zero(dim);
        for (a1, c1) in self.terms() {
            for (a2, c2) in other.terms() {
                out.add_term(a1.add(a2), c1 * c2);
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in self.terms() {
            out.add_term(a.clone(), c.conj());
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms().map(|(a, _)| a.order()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.terms()
            .map(|(a, c)| {
                let mut v = *c;
                for j in 0..self.dim {
                    v *= rpow(x.get(j).copied().unwrap_or(0.0), a.get(j));
                }
                v
            })
            .sum()
    }

    pub fn partial(&self, a: &MultiIndex) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, c) in self.terms() {
            let Some(na) = alpha.checked_sub(a) else {
                continue;
            };
            let f: f64 = (0..self.dim)
                .map(|j| falling_factorial(alpha.get(j), a.get(j)))
                .product();
            out.add_term(na, c * f);
        }
        out
    }

    /// Re-expresses the polynomial on `R^dim` with variable `j` placed at coordinate `slots[j]`.
    pub fn embed(&self, dim: usize, slots: &[usize]) -> Self {
        let mut out = Self::zero(dim);
        for (alpha, c) in self.terms() {
            let mut comps = vec![0u32; dim];
            for (j, &s) in slots.iter().enumerate() {
                comps[s] += alpha.get(j);
            }
            out.add_term(MultiIndex::new(comps), *c);
        }
        out
    }
}

/// An evaluable test function `φ`.
#[derive(Clone)]
pub enum Func {
    Z(ZPoly),
    /// `P(z, z̄) · exp(−c Σ_j |z_j|²)`.
    ZGauss {
        poly: ZPoly,
        c: f64,
    },
    X(XPoly),
    /// `exp(i k·x) · P(x)`.
    Wave {
        k: Vec<f64>,
        poly: XPoly,
    },
    /// Opaque callable, evaluable but not differentiable.
    Custom {
        f: Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>,
        degree: Option<u32>,
    },
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::Z(p) => f.debug_tuple("Z").field(p).finish(),
            Func::ZGauss { poly, c } => f
                .debug_struct("ZGauss")
                .field("poly", poly)
                .field("c", c)
                .finish(),
            Func::X(p) => f.debug_tuple("X").field(p).finish(),
            Func::Wave { k, poly } => f
                .debug_struct("Wave")
                .field("k", k)
                .field("poly", poly)
                .finish(),
            Func::Custom { degree, .. } => {
                f.debug_struct("Custom").field("degree", degree).finish()
            }
        }
    }
}

/// Expansion of `Π_j 2^{-a_j-b_j} (∂x_j − i∂y_j)^{a_j} (∂x_j + i∂y_j)^{b_j}` in real partials.
fn wirtinger_in_real_partials(
    a: &MultiIndex,
    b: &MultiIndex,
    cdim: usize,
) -> Vec<(MultiIndex, C64)> {
    let mut acc: Vec<(Vec<u32>, C64)> = vec![(vec![0; 2 * cdim], C64::new(1.0, 0.0))];
    for j in 0..cdim {
        let (aj, bj) = (a.get(j), b.get(j));
        // coefficients of X^p Y^q in (X − iY)^aj (X + iY)^bj, q = aj + bj − p
        let n = (aj + bj) as usize;
        let mut poly = vec![zero(); n + 1];
        for u in 0..=aj {
            for v in 0..=bj {
                let q = (aj - u) + (bj - v);
                let c = binomial(aj, u) * binomial(bj, v);
                let ph = cpow(-I, aj - u) * cpow(I, bj - v);
                poly[q as usize] += ph * c;
            }
        }
        let scale = 0.5f64.powi((aj + bj) as i32);
        let mut next = Vec::new();
        for (idx, c) in &acc {
            for (q, pc) in poly.iter().enumerate() {
                if *pc == zero() {
                    continue;
                }
                let mut m = idx.clone();
                m[2 * j] += n as u32 - q as u32;
                m[2 * j + 1] += q as u32;
                next.push((m, c * pc * scale));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(m, c)| (MultiIndex::new(m), c))
        .collect()
}

/// Expansion of real partials `∂x^p ∂y^q` (per complex coordinate) in Wirtinger operators.
fn real_partials_in_wirtinger(a: &MultiIndex, cdim: usize) -> Vec<(MultiIndex, MultiIndex, C64)> {
    let mut acc: Vec<(Vec<u32>, Vec<u32>, C64)> =
        vec![(vec![0; cdim], vec![0; cdim], C64::new(1.0, 0.0))];
    for j in 0..cdim {
        let (p, q) = (a.get(2 * j), a.get(2 * j + 1));
        // (D + D̄)^p · i^q (D − D̄)^q
        let mut terms: Vec<(u32, u32, C64)> = Vec::new();
        for u in 0..=p {
            for v in 0..=q {
                let c = binomial(p, u) * binomial(q, v) * if (q - v) % 2 == 1 { -1.0 } else { 1.0 };
                terms.push((u + v, (p - u) + (q - v), cpow(I, q) * c));
            }
        }
        let mut next = Vec::new();
        for (ha, hb, c) in &acc {
            for &(du, dv, tc) in &terms {
                let mut na = ha.clone();
                let mut nb = hb.clone();
                na[j] += du;
                nb[j] += dv;
                next.push((na, nb, c * tc));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(x, y, c)| (MultiIndex::new(x), MultiIndex::new(y), c))
        .collect()
}

impl Func {
    pub fn z_monomial(alpha: &MultiIndex, beta: &MultiIndex) -> Self {
        Func::Z(ZPoly::monomial(alpha, beta, C64::new(1.0, 0.0)))
    }

    pub fn custom(f: impl Fn(&[f64]) -> C64 + Send + Sync + 'static, degree: Option<u32>) -> Self {
        Func::Custom {
            f: Arc::new(f),
            degree,
        }
    }

    pub fn value(&self, x: &[f64]) -> C64 {
        match self {
            Func::Z(p) => p.eval(x),
            Func::ZGauss { poly, c } => {
                let r2: f64 = x.iter().take(2 * poly.dim()).map(|v| v * v).sum();
                poly.eval(x) * (-c * r2).exp()
            }
            Func::X(p) => p.eval(x),
            Func::Wave { k, poly } => {
                let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
                C64::from_polar(1.0, phase) * poly.eval(x)
            }
            Func::Custom { f, .. } => f(x),
        }
    }

    fn complex_dim(&self) -> Option<usize> {
        match self {
            Func::Z(p) | Func::ZGauss { poly: p, .. } => Some(p.dim()),
            _ => None,
        }
    }

    /// `(∂^a ∂̄^b φ)(x)` with `x` read as a point of `C^d`.
    pub fn wirtinger(&self, x: &[f64], a: &MultiIndex, b: &MultiIndex) -> Result<C64> {
        if a.is_zero() && b.is_zero() {
            return Ok(self.value(x));
        }
        match self {
            Func::Z(p) => Ok(p.wirtinger(a, b).eval(x)),
            Func::ZGauss { poly, c } => {
                let d = poly.dim();
                let mut q = poly.clone();
                for j in 0..d {
                    for _ in 0..a.get(j) {
                        q = q
                            .wirtinger(&MultiIndex::unit(d, j), &MultiIndex::zeros(d))
                            .add(&q.mul_coordinate(j, true).scale(C64::new(-c, 0.0)));
                    }
                    for _ in 0..b.get(j) {
                        q = q
                            .wirtinger(&MultiIndex::zeros(d), &MultiIndex::unit(d, j))
                            .add(&q.mul_coordinate(j, false).scale(C64::new(-c, 0.0)));
                    }
                }
                Ok(Func::ZGauss { poly: q, c: *c }.value(x))
            }
            Func::X(_) | Func::Wave { .. } => {
                let cdim = a.dim().max(b.dim()).max(x.len().div_ceil(2));
                let mut acc = zero();
                for (m, c) in wirtinger_in_real_partials(a, b, cdim) {
                    acc += c * self.partial(x, &m)?;
                }
                Ok(acc)
            }
            Func::Custom { .. } => Err(Error::NotEvaluable(
                "opaque function has no derivatives".into(),
            )),
        }
    }

    /// Real partial derivative `∂^a φ(x)`.
    pub fn partial(&self, x: &[f64], a: &MultiIndex) -> Result<C64> {
        if a.is_zero() {
            return Ok(self.value(x));
        }
        match self {
            Func::X(p) => Ok(p.partial(a).eval(x)),
            Func::Wave { k, poly } => {
                let d = a.dim().max(poly.dim()).max(k.len());
                let phase: f64 = k.iter().zip(x).map(|(u, v)| u * v).sum();
                let wave = C64::from_polar(1.0, phase);
                let mut acc = zero();
                for c in MultiIndex::graded_lex(d, a.order()) {
                    if (0..d).any(|j| c.get(j) > a.get(j)) {
                        continue;
                    }
                    let mut coef = C64::new(1.0, 0.0);
                    for j in 0..d {
                        let kj = k.get(j).copied().unwrap_or(0.0);
                        coef *= binomial(a.get(j), c.get(j)) * cpow(I * kj, a.get(j) - c.get(j));
                    }
                    if coef == zero() {
                        continue;
                    }
                    acc += coef * poly.partial(&c).eval(x);
                }
                Ok(acc * wave)
            }
            Func::Z(_) | Func::ZGauss { .. } => {
                let cdim = self.complex_dim().unwrap();
                if a.dim() > 2 * cdim && a.components()[2 * cdim..].iter().any(|&c| c != 0) {
                    return Ok(zero());
                }
                let mut acc = zero();
                for (ha, hb, c) in real_partials_in_wirtinger(a, cdim) {
                    acc += c * self.wirtinger(x, &ha, &hb)?;
                }
                Ok(acc)
            }
            Func::Custom { .. } => Err(Error::NotEvaluable(
                "opaque function has no derivatives".into(),
            )),
        }
    }

    /// `self · conj(other)`.
    pub fn mul_conj(&self, other: &Func) -> Result<Func> {
        match (self, other) {
            (Func::Z(p), Func::Z(q)) => Ok(Func::Z(p.mul(&q.conj()))),
            (Func::ZGauss { poly: p, c: c1 }, Func::ZGauss { poly: q, c: c2 }) => {
                Ok(Func::ZGauss {
                    poly: p.mul(&q.conj()),
                    c: c1 + c2,
                })
            }
            (Func::Z(p), Func::ZGauss { poly: q, c })
            | (Func::ZGauss { poly: p, c }, Func::Z(q)) => Ok(Func::ZGauss {
                poly: p.mul(&q.conj()),
                c: *c,
            }),
            (Func::X(p), Func::X(q)) => Ok(Func::X(p.mul(&q.conj()))),
            (Func::Wave { k, poly }, Func::X(q)) => Ok(Func::Wave {
                k: k.clone(),
                poly: poly.mul(&q.conj()),
            }),
            (Func::X(p), Func::Wave { k, poly }) => Ok(Func::Wave {
                k: k.iter().map(|v| -v).collect(),
                poly: p.mul(&poly.conj()),
            }),
            (Func::Wave { k: k1, poly: p }, Func::Wave { k: k2, poly: q }) => {
                let n = k1.len().max(k2.len());
                let k = (0..n)
                    .map(|j| k1.get(j).copied().unwrap_or(0.0) - k2.get(j).copied().unwrap_or(0.0))
                    .collect();
                Ok(Func::Wave {
                    k,
                    poly: p.mul(&q.conj()),
                })
            }
            _ => {
                let (f, g) = (self.clone(), other.clone());
                let degree = match (f.degree(), g.degree()) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
                Ok(Func::custom(
                    move |x| f.value(x) * g.value(x).conj(),
                    degree,
                ))
            }
        }
    }

    /// Polynomial degree when the function is a polynomial.
    pub fn degree(&self) -> Option<u32> {
        match self {
            Func::Z(p) => Some(p.degree()),
            Func::X(p) => Some(p.degree()),
            Func::Custom { degree, .. } => *degree,
            _ => None,
        }
    }

    /// Polynomial degree that a quadrature must integrate exactly for this function to
    /// be resolved to double precision on a region of the given radius around the origin.
    pub fn quad_degree(&self, radius: f64) -> Option<u32> {
        let taylor = |scale: f64| (std::f64::consts::E * scale).ceil() as u32 + 24;
        match self {
            Func::Z(p) => Some(p.degree()),
            Func::X(p) => Some(p.degree()),
            Func::ZGauss { poly, c } => Some(poly.degree() + 2 * taylor(c * radius * radius)),
            Func::Wave { k, poly } => {
                let kn = k.iter().map(|v| v * v).sum::<f64>().sqrt();
                Some(poly.degree() + taylor(kn * radius))
            }
            Func::Custom { degree, .. } => *degree,
        }
    }
}
