//! Weights `F` and their pairings `⟨F, φ⟩`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::Func;
use crate::numeric::{
    composite_gauss_legendre, cpow, falling_factorial, gauss_legendre, nodes_for_degree,
    parse_rational, periodic_trapezoid, ExactComplex, MultiIndex, C64,
};

/// Extra exactness degree added on top of every declared polynomial degree.
pub const QUAD_MARGIN: u32 = 10;

/// Tolerance below which projected atoms are merged.
pub const MERGE_TOL: f64 = 1e-12;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    /// A point of `C^d`.
    Complex(Vec<C64>),
    /// A point of `R^d`.
    Real(Vec<f64>),
}

impl Location {
    pub fn complex1(z: C64) -> Self {
        Location::Complex(vec![z])
    }

    /// Real coordinates, complex coordinates interleaved as `(re, im)`.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Location::Complex(z) => crate::func::to_real(z),
            Location::Real(x) => x.clone(),
        }
    }

    pub fn real_dim(&self) -> usize {
        match self {
            Location::Complex(z) => 2 * z.len(),
            Location::Real(x) => x.len(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn same_as(&self, other: &Location) -> bool {
        self == other
    }
}

/// One term `coeff · ∂^holo ∂̄^antiholo δ_at`.
///
/// For real locations `holo` is the multi-index of a real partial derivative
/// and `antiholo` must be zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointTerm {
    pub at: Location,
    #[serde(default = "one")]
    pub coeff: C64,
    #[serde(default)]
    pub holo: MultiIndex,
    #[serde(default)]
    pub antiholo: MultiIndex,
}

/// `Σ_q L_q δ_{z_q}` with `⟨L δ_{z₀}, φ⟩ = (Lφ)(z₀)`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDistribution {
    pub terms: Vec<PointTerm>,
}

impl PointDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Σ c_q δ_{z_q}` on `C¹`.
    pub fn masses(points: &[(C64, C64)]) -> Self {
        let mut d = Self::new();
        for &(z, c) in points {
            d = d.with_mass(Location::complex1(z), c);
        }
        d
    }

    /// `Σ c_q δ_{x_q}` on `R^d`.
    pub fn real_masses(points: &[(Vec<f64>, C64)]) -> Self {
        let mut d = Self::new();
        for (x, c) in points {
            d = d.with_mass(Location::Real(x.clone()), *c);
        }
        d
    }

    pub fn with_mass(self, at: Location, coeff: C64) -> Self {
        let dim = match &at {
            Location::Complex(z) => z.len(),
            Location::Real(x) => x.len(),
        };
        self.with_term(at, coeff, MultiIndex::zeros(dim), MultiIndex::zeros(dim))
    }

    pub fn with_term(
        mut self,
        at: Location,
        coeff: C64,
        holo: MultiIndex,
        antiholo: MultiIndex,
    ) -> Self {
        self.terms.push(PointTerm {
            at,
            coeff,
            holo,
            antiholo,
        });
        self
    }

    /// Distinct locations in first-appearance order.
    pub fn locations(&self) -> Vec<Location> {
        let mut out: Vec<Location> = Vec::new();
        for t in &self.terms {
            if !out.iter().any(|l| l.same_as(&t.at)) {
                out.push(t.at.clone());
            }
        }
        out
    }

    /// Number of distinct `(location, holo, antiholo)` terms with nonzero coefficient.
    pub fn distinct_term_count(&self) -> usize {
        let mut seen: Vec<(&Location, &MultiIndex, &MultiIndex)> = Vec::new();
        for t in &self.terms {
            if t.coeff == C64::new(0.0, 0.0) {
                continue;
            }
            if !seen
                .iter()
                .any(|(l, a, b)| l.same_as(&t.at) && **a == t.holo && **b == t.antiholo)
            {
                seen.push((&t.at, &t.holo, &t.antiholo));
            }
        }
        seen.len()
    }

    pub fn max_order(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.holo.order() + t.antiholo.order())
            .max()
            .unwrap_or(0)
    }

    fn pair(&self, phi: &Func) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            let x = t.at.coords();
            let v = match &t.at {
                Location::Complex(_) => phi.wirtinger(&x, &t.holo, &t.antiholo)?,
                Location::Real(_) => {
                    if !t.antiholo.is_zero() {
                        return Err(Error::InvalidWeight(
                            "anti-holomorphic derivative at a real location".into(),
                        ));
                    }
                    phi.partial(&x, &t.holo)?
                }
            };
            acc += t.coeff * v;
        }
        Ok(acc)
    }

    fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| match t.at {
                    Location::Complex(_) => PointTerm {
                        at: t.at.clone(),
                        coeff: t.coeff.conj(),
                        holo: t.antiholo.clone(),
                        antiholo: t.holo.clone(),
                    },
                    Location::Real(_) => PointTerm {
                        coeff: t.coeff.conj(),
                        ..t.clone()
                    },
                })
                .collect(),
        }
    }
}

/// Profile `f(r)` of a radial density.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    /// `Σ c_k r^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `(1 − ((r − center)/half_width)²)₊`.
    ParabolicBump { center: f64, half_width: f64 },
    /// `(1 − (r/radius)²)^power₊`.
    PowerBump { radius: f64, power: u32 },
    /// Sampled callable; smooth between the listed break points.
    #[serde(skip)]
    Callable {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        breakpoints: Vec<f64>,
        /// Polynomial degree on each piece, if the callable is piecewise polynomial.
        degree: Option<u32>,
    },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial { coeffs } => f
                .debug_struct("Polynomial")
                .field("coeffs", coeffs)
                .finish(),
            Self::ParabolicBump { center, half_width } => f
                .debug_struct("ParabolicBump")
                .field("center", center)
                .field("half_width", half_width)
                .finish(),
            Self::PowerBump { radius, power } => f
                .debug_struct("PowerBump")
                .field("radius", radius)
                .field("power", power)
                .finish(),
            Self::Callable {
                breakpoints,
                degree,
                ..
            } => f
                .debug_struct("Callable")
                .field("breakpoints", breakpoints)
                .field("degree", degree)
                .finish(),
        }
    }
}

impl PartialEq for RadialProfile {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Polynomial { coeffs: a }, Self::Polynomial { coeffs: b }) => a == b,
            (
                Self::ParabolicBump {
                    center: a,
                    half_width: b,
                },
                Self::ParabolicBump {
                    center: c,
                    half_width: d,
                },
            ) => a == c && b == d,
            (
                Self::PowerBump {
                    radius: a,
                    power: b,
                },
                Self::PowerBump {
                    radius: c,
                    power: d,
                },
            ) => a == c && b == d,
            (Self::Callable { f: a, .. }, Self::Callable { f: b, .. }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl RadialProfile {
    pub fn constant(c: f64) -> Self {
        Self::Polynomial { coeffs: vec![c] }
    }

    pub fn callable(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breakpoints: Vec<f64>,
        degree: Option<u32>,
    ) -> Self {
        Self::Callable {
            f: Arc::new(f),
            breakpoints,
            degree,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c),
            Self::ParabolicBump { center, half_width } => {
                let u = (r - center) / half_width;
                (1.0 - u * u).max(0.0)
            }
            Self::PowerBump { radius, power } => {
                let u = r / radius;
                if u >= 1.0 {
                    0.0
                } else {
                    (1.0 - u * u).powi(*power as i32)
                }
            }
            Self::Callable { f, .. } => f(r),
        }
    }

    /// Points in `(0, ∞)` where the profile may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Polynomial { .. } => vec![],
            Self::ParabolicBump { center, half_width } => {
                vec![center - half_width, center + half_width]
            }
            Self::PowerBump { radius, .. } => vec![*radius],
            Self::Callable { breakpoints, .. } => breakpoints.clone(),
        }
    }

    /// Polynomial degree in `r` on each smooth piece.
    pub fn piece_degree(&self) -> Option<u32> {
        match self {
            Self::Polynomial { coeffs } => Some(coeffs.len().saturating_sub(1) as u32),
            Self::ParabolicBump { .. } => Some(2),
            Self::PowerBump { power, .. } => Some(2 * power),
            Self::Callable { degree, .. } => *degree,
        }
    }

    /// Radial Laplacian `f'' + (d − 1) f'/r` for polynomial profiles in dimension `dim`.
    pub fn laplacian(&self, dim: usize) -> Result<RadialProfile> {
        let coeffs = match self {
            Self::Polynomial { coeffs } => coeffs.clone(),
            Self::PowerBump { radius, power } => {
                // (1 − r²/R²)^p as a polynomial in r
                let mut c = vec![0.0; 2 * *power as usize + 1];
                for k in 0..=*power {
                    c[2 * k as usize] = crate::numeric::binomial(*power, k)
                        * (-1.0f64 / (radius * radius)).powi(k as i32);
                }
                if *power < 2 {
                    return Err(Error::InvalidArgument(
                        "power bump with power < 2 is not twice differentiable".into(),
                    ));
                }
                c
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "analytic Laplacian is available for polynomial profiles only".into(),
                ))
            }
        };
        if coeffs.get(1).is_some_and(|&c| c != 0.0) && dim > 1 {
            return Err(Error::InvalidArgument(
                "odd linear term makes the Laplacian singular at 0".into(),
            ));
        }
        let d = dim as f64;
        let mut out = vec![0.0; coeffs.len().saturating_sub(2).max(1)];
        for (k, &c) in coeffs.iter().enumerate().skip(2) {
            let kf = k as f64;
            out[k - 2] += c * (kf * (kf - 1.0) + (d - 1.0) * kf);
        }
        let lap = Self::Polynomial { coeffs: out };
        Ok(match self {
            Self::PowerBump { radius, .. } => {
                let r = *radius;
                let degree = lap.piece_degree();
                Self::callable(
                    move |x| if x < r { lap.value(x) } else { 0.0 },
                    vec![r],
                    degree,
                )
            }
            _ => lap,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `dA/π` in the plane.
    NormalizedArea,
    Lebesgue,
}

/// `coeff · f(|x − c|) · (z − c)^α (z̄ − c̄)^β` on the ball `|x − c| ≤ R` of `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialDensity {
    pub profile: RadialProfile,
    #[serde(default = "one")]
    pub coeff: C64,
    pub support_radius: f64,
    /// Real dimension; 2 means the complex plane.
    #[serde(default = "two")]
    pub dim: usize,
    /// Defaults to `dA/π` in the plane and Lebesgue otherwise.
    #[serde(default)]
    pub measure: Option<Measure>,
    #[serde(default)]
    pub center: Vec<f64>,
    /// `(α, β)`, only in the plane.
    #[serde(default)]
    pub angular: [u32; 2],
    /// Fixed Gauss–Legendre size per radial piece; automatic when absent.
    #[serde(default)]
    pub quad_nodes: Option<usize>,
}

fn two() -> usize {
    2
}

impl RadialDensity {
    pub fn disk(profile: RadialProfile, support_radius: f64) -> Self {
        Self {
            profile,
            coeff: one(),
            support_radius,
            dim: 2,
            measure: None,
            center: vec![],
            angular: [0, 0],
            quad_nodes: None,
        }
    }

    pub fn ball(profile: RadialProfile, support_radius: f64, dim: usize) -> Self {
        Self {
            dim,
            ..Self::disk(profile, support_radius)
        }
    }

    pub fn with_center(mut self, c: Vec<f64>) -> Self {
        self.center = c;
        self
    }

    pub fn with_angular(mut self, alpha: u32, beta: u32) -> Self {
        self.angular = [alpha, beta];
        self
    }

    pub fn with_measure(mut self, m: Measure) -> Self {
        self.measure = Some(m);
        self
    }

    pub fn measure(&self) -> Measure {
        self.measure.unwrap_or(if self.dim == 2 {
            Measure::NormalizedArea
        } else {
            Measure::Lebesgue
        })
    }

    pub fn center(&self) -> Vec<f64> {
        let mut c = self.center.clone();
        c.resize(self.dim, 0.0);
        c
    }

    fn validate(&self) -> Result<()> {
        if !(self.support_radius > 0.0) || !self.support_radius.is_finite() {
            return Err(Error::InvalidWeight(format!(
                "support radius {} must be positive",
                self.support_radius
            )));
        }
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidWeight(format!(
                "radial densities need dimension 1..=3, got {}",
                self.dim
            )));
        }
        if self.dim != 2 && self.angular != [0, 0] {
            return Err(Error::InvalidWeight(
                "angular factor is defined only in the plane".into(),
            ));
        }
        if !self.center.is_empty() && self.center.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.center.len(),
            });
        }
        if self.measure() == Measure::NormalizedArea && self.dim != 2 {
            return Err(Error::InvalidWeight(
                "normalized area measure needs dimension 2".into(),
            ));
        }
        Ok(())
    }

    /// Density value at `x` (measure factor excluded).
    pub fn value(&self, x: &[f64]) -> C64 {
        let c = self.center();
        let y: Vec<f64> = (0..self.dim)
            .map(|j| x.get(j).copied().unwrap_or(0.0) - c[j])
            .collect();
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > self.support_radius {
            return C64::new(0.0, 0.0);
        }
        let mut v = self.coeff * self.profile.value(r);
        if self.dim == 2 {
            let w = C64::new(y[0], y[1]);
            v *= cpow(w, self.angular[0]) * cpow(w.conj(), self.angular[1]);
        }
        v
    }

    fn radial_rule(&self, degree: u32) -> Result<Vec<(f64, f64)>> {
        let big_r = self.support_radius;
        let mut breaks = vec![0.0];
        for b in self.profile.breakpoints() {
            if b > 0.0 && b < big_r {
                breaks.push(b);
            }
        }
        breaks.push(big_r);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let required = self
            .profile
            .piece_degree()
            .map(|p| nodes_for_degree((degree + p + QUAD_MARGIN) as usize));
        let n = match (self.quad_nodes, required) {
            (Some(n), Some(req)) if n < req => {
                return Err(Error::QuadratureInsufficient {
                    required: req,
                    provided: n,
                })
            }
            (Some(n), _) => n,
            (None, Some(req)) => req,
            (None, None) => {
                return Err(Error::NotEvaluable(
                    "profile of unknown degree needs a fixed quadrature size".into(),
                ))
            }
        };
        Ok(composite_gauss_legendre(n, &breaks)?.pairs().collect())
    }

    /// Nodes and weights (density and measure folded in) resolving test functions of the given degree.
    pub fn nodes(&self, degree: u32) -> Result<Vec<(Vec<f64>, C64)>> {
        self.validate()?;
        let c = self.center();
        let mut out = Vec::new();
        match self.dim {
            1 => {
                for (r, w) in self.radial_rule(degree)? {
                    let f = self.coeff * self.profile.value(r) * w;
                    out.push((vec![c[0] + r, 0.0][..1].to_vec(), f));
                    out.push((vec![c[0] - r], f));
                }
            }
            2 => {
                let [a, b] = self.angular;
                let trig = degree + a + b;
                let theta = periodic_trapezoid((trig + 1 + QUAD_MARGIN) as usize)?;
                let scale = if self.measure() == Measure::NormalizedArea {
                    1.0 / PI
                } else {
                    1.0
                };
                for (r, wr) in self.radial_rule(degree + a + b + 1)? {
                    let fr = self.coeff * self.profile.value(r) * wr * r * scale;
                    for (t, wt) in theta.pairs() {
                        let w = C64::from_polar(r, t);
                        let ang = cpow(w, a) * cpow(w.conj(), b);
                        out.push((vec![c[0] + w.re, c[1] + w.im], fr * ang * wt));
                    }
                }
            }
            3 => {
                let mu = gauss_legendre(
                    nodes_for_degree((degree + QUAD_MARGIN) as usize),
                    [-1.0, 1.0],
                )?;
                let phi = periodic_trapezoid((degree + 1 + QUAD_MARGIN) as usize)?;
                for (r, wr) in self.radial_rule(degree + 2)? {
                    let fr = self.coeff * self.profile.value(r) * wr * r * r;
                    for (m, wm) in mu.pairs() {
                        let s = (1.0 - m * m).max(0.0).sqrt();
                        for (p, wp) in phi.pairs() {
                            out.push((
                                vec![c[0] + r * s * p.cos(), c[1] + r * s * p.sin(), c[2] + r * m],
                                fr * wm * wp,
                            ));
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Largest distance of the support from the origin.
    pub fn extent(&self) -> f64 {
        self.center().iter().map(|v| v * v).sum::<f64>().sqrt() + self.support_radius
    }
}

mod rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            S(String),
            I(i64),
            F(f64),
        }
        match Repr::deserialize(d)? {
            Repr::S(s) => parse_rational(&s).map_err(serde::de::Error::custom),
            Repr::I(i) => Ok(BigRational::from_integer(i.into())),
            Repr::F(f) => BigRational::from_float(f)
                .ok_or_else(|| serde::de::Error::custom("non-finite radius")),
        }
    }
}

/// One term `c · z^z z̄^zbar`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub z: u32,
    pub zbar: u32,
    pub coeff: ExactComplex,
}

/// Polynomial in `(z, z̄)` with exact coefficients on the disk `|z| ≤ ρ`, against `dA/π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDensity {
    pub terms: Vec<PolyTerm>,
    #[serde(with = "rational_serde")]
    pub radius: BigRational,
}

impl PolynomialDensity {
    pub fn new(terms: Vec<(u32, u32, ExactComplex)>, radius: BigRational) -> Self {
        Self {
            terms: terms
                .into_iter()
                .map(|(z, zbar, coeff)| PolyTerm { z, zbar, coeff })
                .collect(),
            radius,
        }
    }

    pub fn one_on_unit_disk() -> Self {
        Self::new(
            vec![(0, 0, ExactComplex::one())],
            BigRational::from_integer(1.into()),
        )
    }

    fn validate(&self) -> Result<()> {
        if self.radius <= BigRational::zero() {
            return Err(Error::InvalidWeight(
                "polynomial density radius must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius.to_f64().unwrap_or(f64::NAN)
    }

    pub fn value(&self, z: C64) -> C64 {
        if z.norm() > self.radius_f64() {
            return C64::new(0.0, 0.0);
        }
        self.terms
            .iter()
            .map(|t| t.coeff.to_c64() * cpow(z, t.z) * cpow(z.conj(), t.zbar))
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.z + t.zbar).max().unwrap_or(0)
    }

    /// `(1/π) ∫_{|z|≤ρ} z^m z̄^m dA = ρ^{2m+2}/(m+1)`.
    fn disk_moment(&self, m: u32) -> BigRational {
        let rho2 = &self.radius * &self.radius;
        num_traits::pow(rho2, m as usize + 1) / BigRational::from_integer((m + 1).into())
    }

    /// `⟨F, z^a z̄^b⟩` without rounding.
    pub fn moment_exact(&self, a: u32, b: u32) -> ExactComplex {
        let mut acc = ExactComplex::zero();
        for t in &self.terms {
            if a + t.z == b + t.zbar {
                acc += &t.coeff.scale(&self.disk_moment(a + t.z));
            }
        }
        acc
    }

    pub fn nodes(&self, degree: u32) -> Result<Vec<(Vec<f64>, C64)>> {
        self.validate()?;
        let rho = self.radius_f64();
        let total = degree + self.degree();
        let r_rule = gauss_legendre(
            nodes_for_degree((total + 1 + QUAD_MARGIN) as usize),
            [0.0, rho],
        )?;
        let theta = periodic_trapezoid((total + 1 + QUAD_MARGIN) as usize)?;
        let mut out = Vec::new();
        for (r, wr) in r_rule.pairs() {
            for (t, wt) in theta.pairs() {
                let z = C64::from_polar(r, t);
                out.push((vec![z.re, z.im], self.value(z) * (wr * wt * r / PI)));
            }
        }
        Ok(out)
    }
}

/// Complex samples on cells of a rectangular grid, integrated by the midpoint rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDensity {
    /// Lower corner of the grid.
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub values: Vec<C64>,
    /// Measure of one cell; the product of spacings when absent.
    #[serde(default)]
    pub cell_measure: Option<f64>,
}

impl GridDensity {
    /// Samples `f` at cell centres.
    pub fn sample(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        f: impl Fn(&[f64]) -> C64,
    ) -> Self {
        let mut g = Self {
            values: Vec::new(),
            origin,
            spacing,
            shape,
            cell_measure: None,
        };
        let n: usize = g.shape.iter().product();
        g.values = (0..n).map(|i| f(&g.center(i))).collect();
        g
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + (i as f64 + 0.5) * self.spacing[a])
            .collect()
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
            .unwrap_or_else(|| self.spacing.iter().product())
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.origin.len() != d || self.spacing.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.origin.len().min(self.spacing.len()),
            });
        }
        if self.spacing.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::InvalidWeight("grid spacing must be positive".into()));
        }
        let n: usize = self.shape.iter().product();
        if n != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn nodes(&self) -> Result<Vec<(Vec<f64>, C64)>> {
        self.validate()?;
        let m = self.cell_measure();
        Ok(self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|(i, v)| (self.center(i), v * m))
            .collect())
    }

    pub fn extent(&self) -> f64 {
        (0..self.dim())
            .map(|a| {
                let lo = self.origin[a];
                let hi = lo + self.spacing[a] * self.shape[a] as f64;
                lo.abs().max(hi.abs()).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// A weight `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Points(PointDistribution),
    Radial(RadialDensity),
    Polynomial(PolynomialDensity),
    Grid(GridDensity),
}

impl From<PointDistribution> for WeightSpec {
    fn from(p: PointDistribution) -> Self {
        WeightSpec::Points(p)
    }
}

impl From<RadialDensity> for WeightSpec {
    fn from(p: RadialDensity) -> Self {
        WeightSpec::Radial(p)
    }
}

impl From<PolynomialDensity> for WeightSpec {
    fn from(p: PolynomialDensity) -> Self {
        WeightSpec::Polynomial(p)
    }
}

impl From<GridDensity> for WeightSpec {
    fn from(p: GridDensity) -> Self {
        WeightSpec::Grid(p)
    }
}

impl WeightSpec {
    pub fn zero() -> Self {
        WeightSpec::Points(PointDistribution::new())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Points(p) => {
                for t in &p.terms {
                    if t.at.coords().iter().any(|v| !v.is_finite())
                        || !t.coeff.re.is_finite()
                        || !t.coeff.im.is_finite()
                    {
                        return Err(Error::InvalidWeight("non-finite point term".into()));
                    }
                    if let Location::Real(_) = t.at {
                        if !t.antiholo.is_zero() {
                            return Err(Error::InvalidWeight(
                                "anti-holomorphic derivative at a real location".into(),
                            ));
                        }
                    }
                }
                let dims: Vec<usize> = p.terms.iter().map(|t| t.at.real_dim()).collect();
                if dims.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::InvalidWeight(
                        "point locations of mixed dimension".into(),
                    ));
                }
                Ok(())
            }
            WeightSpec::Radial(r) => r.validate(),
            WeightSpec::Polynomial(p) => p.validate(),
            WeightSpec::Grid(g) => g.validate(),
        }
    }

    /// Whether pairings with exact data can be evaluated without rounding.
    pub fn is_exact(&self) -> bool {
        match self {
            WeightSpec::Polynomial(_) => true,
            WeightSpec::Points(p) => p.terms.iter().all(|t| matches!(t.at, Location::Complex(_))),
            _ => false,
        }
    }

    /// Largest distance of the support from the origin.
    pub fn extent(&self) -> f64 {
        match self {
            WeightSpec::Points(p) => p.terms.iter().map(|t| t.at.norm()).fold(0.0, f64::max),
            WeightSpec::Radial(r) => r.extent(),
            WeightSpec::Polynomial(p) => p.radius_f64(),
            WeightSpec::Grid(g) => g.extent(),
        }
    }

    /// Quadrature nodes with weights `F(x) dμ(x)`, for densities.
    pub fn nodes(&self, degree: u32) -> Result<Option<Vec<(Vec<f64>, C64)>>> {
        match self {
            WeightSpec::Points(_) => Ok(None),
            WeightSpec::Radial(r) => r.nodes(degree).map(Some),
            WeightSpec::Polynomial(p) => p.nodes(degree).map(Some),
            WeightSpec::Grid(g) => g.nodes().map(Some),
        }
    }

    /// `⟨F, φ⟩`.
    pub fn pair(&self, phi: &Func) -> Result<C64> {
        self.validate()?;
        if let (WeightSpec::Polynomial(p), Func::Z(q)) = (self, phi) {
            if q.dim() == 1 {
                let mut acc = C64::new(0.0, 0.0);
                for (a, b, c) in q.terms() {
                    acc += c * p.moment_exact(a.get(0), b.get(0)).to_c64();
                }
                return Ok(acc);
            }
        }
        if let WeightSpec::Points(p) = self {
            return p.pair(phi);
        }
        let degree = phi
            .quad_degree(self.extent())
            .ok_or_else(|| Error::NotEvaluable("test function of unknown degree".into()))?;
        let nodes = self.nodes(degree)?.expect("density");
        Ok(nodes.iter().map(|(x, w)| w * phi.value(x)).sum())
    }

    /// `a_{αβ} = ⟨F, z^α z̄^β⟩`.
    pub fn moment(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Result<C64> {
        self.pair(&Func::z_monomial(alpha, beta))
    }

    /// `⟨F, z^α z̄^β⟩` in exact arithmetic for polynomial densities and point distributions.
    pub fn moment_exact(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Result<ExactComplex> {
        match self {
            WeightSpec::Polynomial(p) => {
                if alpha.dim() > 1 || beta.dim() > 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        found: alpha.dim().max(beta.dim()),
                    });
                }
                Ok(p.moment_exact(alpha.get(0), beta.get(0)))
            }
            WeightSpec::Points(p) => {
                let mut acc = ExactComplex::zero();
                for t in &p.terms {
                    let Location::Complex(z) = &t.at else {
                        return Err(Error::NotExact("real point locations".into()));
                    };
                    let mut v = ExactComplex::from_c64(t.coeff)
                        .ok_or_else(|| Error::NotExact("non-finite coefficient".into()))?;
                    for (j, zj) in z.iter().enumerate() {
                        let (al, be) = (alpha.get(j), beta.get(j));
                        let (a, b) = (t.holo.get(j), t.antiholo.get(j));
                        if a > al || b > be {
                            v = ExactComplex::zero();
                            break;
                        }
                        let w = ExactComplex::from_c64(*zj)
                            .ok_or_else(|| Error::NotExact("non-finite location".into()))?;
                        let ff = falling_factorial(al, a) * falling_factorial(be, b);
                        v = &v * &ExactComplex::real(BigRational::from_float(ff).unwrap());
                        v = &v * &w.pow(al - a);
                        v = &v * &w.conj().pow(be - b);
                    }
                    acc += &v;
                }
                Ok(acc)
            }
            _ => Err(Error::NotExact(
                "only polynomial densities and point distributions are exact".into(),
            )),
        }
    }

    /// `conj(F)`, defined by `⟨conj F, φ⟩ = conj ⟨F, conj φ⟩`.
    pub fn conj(&self) -> Self {
        match self {
            WeightSpec::Points(p) => WeightSpec::Points(p.conj()),
            WeightSpec::Radial(r) => WeightSpec::Radial(RadialDensity {
                coeff: r.coeff.conj(),
                angular: [r.angular[1], r.angular[0]],
                ..r.clone()
            }),
            WeightSpec::Polynomial(p) => WeightSpec::Polynomial(PolynomialDensity {
                terms: p
                    .terms
                    .iter()
                    .map(|t| PolyTerm {
                        z: t.zbar,
                        zbar: t.z,
                        coeff: t.coeff.conj(),
                    })
                    .collect(),
                radius: p.radius.clone(),
            }),
            WeightSpec::Grid(g) => WeightSpec::Grid(GridDensity {
                values: g.values.iter().map(|v| v.conj()).collect(),
                ..g.clone()
            }),
        }
    }

    /// `a·F₁ + b·F₂` for weights of the same kind on the same support.
    pub fn linear_combination(
        a: C64,
        f1: &WeightSpec,
        b: C64,
        f2: &WeightSpec,
    ) -> Result<WeightSpec> {
        match (f1, f2) {
            (WeightSpec::Points(p), WeightSpec::Points(q)) => {
                let mut terms: Vec<PointTerm> = p
                    .terms
                    .iter()
                    .map(|t| PointTerm {
                        coeff: t.coeff * a,
                        ..t.clone()
                    })
                    .collect();
                terms.extend(q.terms.iter().map(|t| PointTerm {
                    coeff: t.coeff * b,
                    ..t.clone()
                }));
                Ok(WeightSpec::Points(PointDistribution { terms }))
            }
            (WeightSpec::Polynomial(p), WeightSpec::Polynomial(q)) if p.radius == q.radius => {
                let ea =
                    ExactComplex::from_c64(a).ok_or_else(|| Error::NotExact("scalar".into()))?;
                let eb =
                    ExactComplex::from_c64(b).ok_or_else(|| Error::NotExact("scalar".into()))?;
                let mut terms: Vec<PolyTerm> = p
                    .terms
                    .iter()
                    .map(|t| PolyTerm {
                        coeff: &t.coeff * &ea,
                        ..t.clone()
                    })
                    .collect();
                terms.extend(q.terms.iter().map(|t| PolyTerm {
                    coeff: &t.coeff * &eb,
                    ..t.clone()
                }));
                Ok(WeightSpec::Polynomial(PolynomialDensity {
                    terms,
                    radius: p.radius.clone(),
                }))
            }
            (WeightSpec::Grid(g), WeightSpec::Grid(h))
                if g.origin == h.origin
                    && g.spacing == h.spacing
                    && g.shape == h.shape
                    && g.cell_measure == h.cell_measure =>
            {
                Ok(WeightSpec::Grid(GridDensity {
                    values: g
                        .values
                        .iter()
                        .zip(&h.values)
                        .map(|(u, v)| a * u + b * v)
                        .collect(),
                    ..g.clone()
                }))
            }
            (WeightSpec::Radial(r), WeightSpec::Radial(s)) if r == s => {
                Ok(WeightSpec::Radial(RadialDensity {
                    coeff: r.coeff * (a + b),
                    ..r.clone()
                }))
            }
            _ => Err(Error::InvalidArgument(
                "linear combination needs weights of one kind on one support".into(),
            )),
        }
    }
}

/// `f̂(l) = ∫₀^R f(r) r^l dr`.
pub fn radial_moment(profile: &RadialProfile, support_radius: f64, l: u32) -> Result<f64> {
    let dens = RadialDensity {
        dim: 2,
        ..RadialDensity::disk(profile.clone(), support_radius)
    };
    let rule = dens.radial_rule(l)?;
    Ok(rule
        .iter()
        .map(|&(r, w)| w * profile.value(r) * r.powi(l as i32))
        .sum())
}

/// `G(z) = ⟨F_w, 1/(π(z − w))⟩` for weights on the complex plane.
pub fn cauchy_transform(f: &WeightSpec, z: C64) -> Result<C64> {
    f.validate()?;
    let kernel = |w: C64| 1.0 / (PI * (z - w));
    match f {
        WeightSpec::Points(p) => {
            let mut acc = C64::new(0.0, 0.0);
            for t in &p.terms {
                let Location::Complex(loc) = &t.at else {
                    return Err(Error::InvalidWeight(
                        "Cauchy transform needs points of C¹".into(),
                    ));
                };
                if loc.len() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        found: loc.len(),
                    });
                }
                let w = loc[0];
                let dist = (z - w).norm();
                if dist < 1e-9 * (1.0 + z.norm()) {
                    return Err(Error::NearSupport { distance: dist });
                }
                // the kernel is holomorphic in w, so ∂̄ terms vanish
                if t.antiholo.get(0) > 0 {
                    continue;
                }
                let a = t.holo.get(0);
                acc += t.coeff * crate::numeric::factorial(a) * kernel(w) / cpow(z - w, a);
            }
            Ok(acc)
        }
        WeightSpec::Radial(_) | WeightSpec::Polynomial(_) => {
            let (c, big_r) = match f {
                WeightSpec::Radial(r) => {
                    if r.dim != 2 {
                        return Err(Error::InvalidWeight(
                            "Cauchy transform needs a planar weight".into(),
                        ));
                    }
                    let c = r.center();
                    (C64::new(c[0], c[1]), r.support_radius)
                }
                WeightSpec::Polynomial(p) => (C64::new(0.0, 0.0), p.radius_f64()),
                _ => unreachable!(),
            };
            let dist = (z - c).norm() - big_r;
            let rho = big_r / (z - c).norm();
            // geometric convergence rate rho^M of the angular sum
            let m = if rho < 1.0 {
                (-40.0 / rho.ln()).ceil()
            } else {
                f64::INFINITY
            };
            if !(dist > 0.0) || m > 20_000.0 {
                return Err(Error::NearSupport {
                    distance: dist.max(0.0),
                });
            }
            let nodes = f.nodes(m as u32)?.expect("density");
            Ok(nodes
                .iter()
                .map(|(x, w)| w * kernel(C64::new(x[0], x[1])))
                .sum())
        }
        WeightSpec::Grid(g) => {
            if g.dim() != 2 {
                return Err(Error::InvalidWeight(
                    "Cauchy transform needs a planar weight".into(),
                ));
            }
            let h = g.spacing.iter().copied().fold(0.0, f64::max);
            let nodes = g.nodes()?;
            let dist = nodes
                .iter()
                .map(|(x, _)| (z - C64::new(x[0], x[1])).norm())
                .fold(f64::INFINITY, f64::min);
            if dist < 2.0 * h {
                return Err(Error::NearSupport { distance: dist });
            }
            Ok(nodes
                .iter()
                .map(|(x, w)| w * kernel(C64::new(x[0], x[1])))
                .sum())
        }
    }
}

/// Tail expansion `π⁻¹ Σ_{k<terms} z^{−k−1} ⟨F, w^k⟩`, valid outside the support disk.
pub fn cauchy_tail(f: &WeightSpec, z: C64, terms: u32) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..terms {
        let m = f.moment(&MultiIndex::scalar(k), &MultiIndex::scalar(0))?;
        acc += m / cpow(z, k + 1);
    }
    Ok(acc / PI)
}

/// Push-forward of a discrete (or gridded) measure on `R^d` under `x ↦ x·ζ`.
///
/// Coincident images (within `MERGE_TOL`) are merged and cancelled terms dropped.
pub fn project_measure(mu: &WeightSpec, zeta: &[f64]) -> Result<WeightSpec> {
    let norm = zeta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit { norm });
    }
    let dot = |x: &[f64]| -> Result<f64> {
        if x.len() != zeta.len() {
            return Err(Error::DimensionMismatch {
                expected: zeta.len(),
                found: x.len(),
            });
        }
        Ok(x.iter().zip(zeta).map(|(a, b)| a * b).sum())
    };
    // (t, derivative order, coefficient)
    let mut raw: Vec<(f64, u32, C64)> = Vec::new();
    match mu {
        WeightSpec::Points(p) => {
            for t in &p.terms {
                if !t.antiholo.is_zero() {
                    return Err(Error::InvalidWeight(
                        "projection needs real derivative terms".into(),
                    ));
                }
                let x = t.at.coords();
                // ∂^a [φ(x·ζ)] = ζ^a φ^{(|a|)}(x·ζ)
                let mut c = t.coeff;
                for (j, &zj) in zeta.iter().enumerate() {
                    c *= zj.powi(t.holo.get(j) as i32);
                }
                raw.push((dot(&x)?, t.holo.order(), c));
            }
        }
        WeightSpec::Grid(g) => {
            for (x, w) in g.nodes()? {
                raw.push((dot(&x)?, 0, w));
            }
        }
        _ => {
            return Err(Error::InvalidWeight(
                "projection is defined for discrete or gridded measures".into(),
            ))
        }
    }
    raw.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let scale = raw.iter().map(|r| r.2.norm()).fold(0.0, f64::max);
    let mut merged: Vec<(f64, u32, C64)> = Vec::new();
    for (t, k, c) in raw {
        match merged.last_mut() {
            Some(last) if last.1 == k && (last.0 - t).abs() <= MERGE_TOL * (1.0 + t.abs()) => {
                last.2 += c
            }
            _ => merged.push((t, k, c)),
        }
    }
    let dist = merged
        .into_iter()
        .filter(|m| m.2.norm() > 1e-14 * scale)
        .fold(PointDistribution::new(), |d, (t, k, c)| {
            d.with_term(
                Location::Real(vec![t]),
                c,
                MultiIndex::scalar(k),
                MultiIndex::scalar(0),
            )
        });
    Ok(WeightSpec::Points(dist))
}

/// `(Fμ)(ξ) = ⟨μ, e^{−i x·ξ}⟩`.
pub fn fourier_transform(mu: &WeightSpec, xi: &[f64]) -> Result<C64> {
    let d = xi.len();
    mu.pair(&Func::Wave {
        k: xi.iter().map(|v| -v).collect(),
        poly: crate::func::XPoly::constant(d, one()),
    })
}
