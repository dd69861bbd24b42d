//! Test-function families for the Bergman-type spaces.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{Func, XPoly, ZPoly};
use crate::numeric::{cpow, factorial, MultiIndex, C64};
use crate::physics::landau::{landau_functions, CreationConvention};

/// Default maximal degree of the solid harmonics in `R³`.
pub const DEFAULT_HARMONIC_DEGREE: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisSpec {
    /// Raw monomials `z^α` in `C^dim`, graded-lex order; exact-capable.
    Monomial {
        #[serde(default = "one_dim")]
        dim: usize,
    },
    /// `e_s(z) = √(s+1) z^s`.
    DiskMonomial,
    /// `Π_j √(α_j+1) z_j^{α_j}`, graded-lex order.
    PolydiskMonomial { dim: usize },
    /// `z^α / √(Π_j π α_j! 2^{α_j+1})`, orthonormal against `e^{−|z|²/2} dA`.
    FockMonomial {
        #[serde(default = "one_dim")]
        dim: usize,
    },
    /// `{1, Re z^k, Im z^k}` on `R²`, or on two coordinates of a larger space.
    Harmonic2 {
        #[serde(default = "two_dim")]
        ambient: usize,
        #[serde(default = "plane_slots")]
        slots: [usize; 2],
    },
    /// Real solid harmonics `r^l Y_l^m` on `R³`, unit norm on the unit ball.
    Harmonic3,
    /// `x ↦ e^{iω·x}` for the listed unit vectors.
    PlaneWave { directions: Vec<Vec<f64>> },
    /// Orthonormal basis of the level-`q` eigenspace of the Landau Hamiltonian with field `b`.
    Landau {
        b: f64,
        q: u32,
        #[serde(default)]
        convention: CreationConvention,
    },
}

fn one_dim() -> usize {
    1
}

fn two_dim() -> usize {
    2
}

fn plane_slots() -> [usize; 2] {
    [0, 1]
}

impl BasisSpec {
    pub fn harmonic2() -> Self {
        BasisSpec::Harmonic2 {
            ambient: 2,
            slots: [0, 1],
        }
    }

    /// Whether the functions are only meaningful on the unit disk or polydisk.
    pub fn lives_on_disk(&self) -> bool {
        matches!(
            self,
            BasisSpec::DiskMonomial | BasisSpec::PolydiskMonomial { .. }
        )
    }

    /// Whether entries against exact weights can be computed without rounding.
    pub fn is_exact(&self) -> bool {
        matches!(self, BasisSpec::Monomial { .. })
    }

    /// Real dimension of the domain.
    pub fn real_dim(&self) -> usize {
        match self {
            BasisSpec::Monomial { dim }
            | BasisSpec::PolydiskMonomial { dim }
            | BasisSpec::FockMonomial { dim } => 2 * dim,
            BasisSpec::DiskMonomial | BasisSpec::Landau { .. } => 2,
            BasisSpec::Harmonic2 { ambient, .. } => *ambient,
            BasisSpec::Harmonic3 => 3,
            BasisSpec::PlaneWave { directions } => directions.first().map_or(0, |d| d.len()),
        }
    }
}

/// A truncated basis family `f_0, …, f_{size−1}`.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    spec: BasisSpec,
    members: Vec<Func>,
    labels: Vec<MultiIndex>,
}

impl BasisFamily {
    pub fn new(spec: BasisSpec, size: usize) -> Result<Self> {
        let (members, labels) = build(&spec, size)?;
        Ok(Self {
            spec,
            members,
            labels,
        })
    }

    pub fn disk(size: usize) -> Self {
        Self::new(BasisSpec::DiskMonomial, size).expect("disk monomials")
    }

    pub fn monomial(size: usize) -> Self {
        Self::new(BasisSpec::Monomial { dim: 1 }, size).expect("monomials")
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, j: usize) -> Result<&Func> {
        self.members.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.members.len(),
        })
    }

    pub fn members(&self) -> &[Func] {
        &self.members
    }

    pub fn labels(&self) -> &[MultiIndex] {
        &self.labels
    }

    /// Restriction to the listed positions, order preserved.
    pub fn select(&self, keep: &[usize]) -> Self {
        Self {
            spec: self.spec.clone(),
            members: keep.iter().map(|&i| self.members[i].clone()).collect(),
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// `f_j(x)` for a spec and index.
pub fn eval_basis(spec: &BasisSpec, size: usize, index: usize, x: &[f64]) -> Result<C64> {
    if index >= size {
        return Err(Error::IndexOutOfRange { index, len: size });
    }
    let fam = BasisFamily::new(spec.clone(), index + 1)?;
    Ok(fam.member(index)?.value(x))
}

/// First `size` multi-indices of `Z₊^dim` in graded-lex order.
pub fn graded_lex_prefix(dim: usize, size: usize) -> Vec<MultiIndex> {
    let mut order = 0;
    loop {
        let all = MultiIndex::graded_lex(dim, order);
        if all.len() >= size {
            return all.into_iter().take(size).collect();
        }
        order += 1;
    }
}

fn z_monomial(alpha: &MultiIndex, c: f64) -> Func {
    Func::Z(ZPoly::monomial(
        alpha,
        &MultiIndex::zeros(alpha.dim()),
        C64::new(c, 0.0),
    ))
}

fn build(spec: &BasisSpec, size: usize) -> Result<(Vec<Func>, Vec<MultiIndex>)> {
    let scalar_labels = || (0..size as u32).map(MultiIndex::scalar).collect::<Vec<_>>();
    match spec {
        BasisSpec::Monomial { dim }
        | BasisSpec::PolydiskMonomial { dim }
        | BasisSpec::FockMonomial { dim } => {
            if *dim == 0 {
                return Err(Error::InvalidArgument(
                    "basis dimension must be positive".into(),
                ));
            }
            let labels = graded_lex_prefix(*dim, size);
            let members = labels
                .iter()
                .map(|a| {
                    let c = match spec {
                        BasisSpec::Monomial { .. } => 1.0,
                        BasisSpec::PolydiskMonomial { .. } => a
                            .components()
                            .iter()
                            .map(|&k| f64::from(k + 1).sqrt())
                            .product(),
                        _ => a
                            .components()
                            .iter()
                            .map(|&k| 1.0 / (PI * factorial(k) * 2f64.powi(k as i32 + 1)).sqrt())
                            .product(),
                    };
                    z_monomial(a, c)
                })
                .collect();
            Ok((members, labels))
        }
        BasisSpec::DiskMonomial => {
            let members = (0..size as u32)
                .map(|s| z_monomial(&MultiIndex::scalar(s), f64::from(s + 1).sqrt()))
                .collect();
            Ok((members, scalar_labels()))
        }
        BasisSpec::Harmonic2 { ambient, slots } => {
            if slots[0] == slots[1] || slots.iter().any(|&s| s >= *ambient) {
                return Err(Error::InvalidArgument(format!(
                    "invalid harmonic plane slots {slots:?}"
                )));
            }
            let mut members = Vec::with_capacity(size);
            let mut labels = Vec::with_capacity(size);
            for j in 0..size {
                let (k, part) = harmonic2_label(j);
                members.push(Func::X(plane_harmonic(k, part).embed(*ambient, slots)));
                labels.push(MultiIndex::new(vec![k, part]));
            }
            Ok((members, labels))
        }
        BasisSpec::Harmonic3 => {
            let mut members = Vec::with_capacity(size);
            let mut labels = Vec::with_capacity(size);
            let mut l = 0;
            while members.len() < size {
                for (m, part, p) in solid_harmonics(l) {
                    if members.len() == size {
                        break;
                    }
                    members.push(Func::X(p));
                    labels.push(MultiIndex::new(vec![l, m, part]));
                }
                l += 1;
            }
            Ok((members, labels))
        }
        BasisSpec::PlaneWave { directions } => {
            if size > directions.len() {
                return Err(Error::IndexOutOfRange {
                    index: size - 1,
                    len: directions.len(),
                });
            }
            let d = directions.first().map_or(0, |v| v.len());
            let mut members = Vec::with_capacity(size);
            for w in directions.iter().take(size) {
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::NotUnit { norm });
                }
                if w.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: w.len(),
                    });
                }
                members.push(Func::Wave {
                    k: w.clone(),
                    poly: XPoly::constant(d, C64::new(1.0, 0.0)),
                });
            }
            Ok((members, scalar_labels()))
        }
        BasisSpec::Landau { b, q, convention } => Ok((
            landau_functions(*b, *q, size, *convention)?,
            scalar_labels(),
        )),
    }
}

/// `(k, part)` of the `j`-th planar harmonic: `1, Re z, Im z, Re z², …`.
fn harmonic2_label(j: usize) -> (u32, u32) {
    if j == 0 {
        (0, 0)
    } else {
        (j.div_ceil(2) as u32, ((j + 1) % 2) as u32)
    }
}

/// `Re z^k` (`part = 0`) or `Im z^k` (`part = 1`) as a polynomial in `(x, y)`.
pub fn plane_harmonic(k: u32, part: u32) -> XPoly {
    let mut p = XPoly::zero(2);
    // (x + iy)^k = Σ C(k,j) x^{k−j} (iy)^j
    for j in 0..=k {
        let c = crate::numeric::binomial(k, j) * cpow(C64::new(0.0, 1.0), j);
        let v = if part == 0 { c.re } else { c.im };
        if v != 0.0 {
            p.add_term(MultiIndex::new(vec![k - j, j]), C64::new(v, 0.0));
        }
    }
    p
}

/// Real solid harmonics of degree `l`: `(m, part, polynomial)` ordered `C_l^0, C_l^1, S_l^1, …`,
/// each of unit `L²` norm on the unit ball.
pub fn solid_harmonics(l: u32) -> Vec<(u32, u32, XPoly)> {
    let x = XPoly::coordinate(3, 0);
    let y = XPoly::coordinate(3, 1);
    let z = XPoly::coordinate(3, 2);
    let r2 = x.mul(&x).add(&y.mul(&y)).add(&z.mul(&z));
    let xy = x.add(&y.scale(C64::new(0.0, 1.0)));
    let mut out = Vec::new();
    for m in 0..=l {
        // r^l P_l^m(cos θ) e^{imφ} / sin^m θ-free form: (x+iy)^m Σ_k c_k z^{l−m−2k} r^{2k}
        let mut radial = XPoly::zero(3);
        let mut zpow = vec![XPoly::constant(3, C64::new(1.0, 0.0))];
        for _ in 0..l {
            let last = zpow.last().unwrap().mul(&z);
            zpow.push(last);
        }
        let mut r2k = XPoly::constant(3, C64::new(1.0, 0.0));
        let mut k = 0;
        while 2 * k + m <= l {
            let c = if k % 2 == 0 { 1.0 } else { -1.0 } * factorial(2 * l - 2 * k)
                / (2f64.powi(l as i32)
                    * factorial(k)
                    * factorial(l - k)
                    * factorial(l - 2 * k - m));
            radial = radial.add(
                &zpow[(l - m - 2 * k) as usize]
                    .mul(&r2k)
                    .scale(C64::new(c, 0.0)),
            );
            r2k = r2k.mul(&r2);
            k += 1;
        }
        let mut xym = XPoly::constant(3, C64::new(1.0, 0.0));
        for _ in 0..m {
            xym = xym.mul(&xy);
        }
        let full = xym.mul(&radial);
        // ∫_ball |r^l P_l^m cos mφ|² = 2/(2l+1)·(l+m)!/(l−m)!·(π or 2π)/(2l+3)
        let sphere = 2.0 / (2.0 * l as f64 + 1.0) * factorial(l + m) / factorial(l - m);
        let ball = sphere * if m == 0 { 2.0 * PI } else { PI } / (2.0 * l as f64 + 3.0);
        let s = 1.0 / ball.sqrt();
        let re = real_part(&full).scale(C64::new(s, 0.0));
        out.push((m, 0, re));
        if m > 0 {
            let im = real_part(&full.scale(C64::new(0.0, -1.0))).scale(C64::new(s, 0.0));
            out.push((m, 1, im));
        }
    }
    out
}

fn real_part(p: &XPoly) -> XPoly {
    let mut out = XPoly::zero(p.dim());
    for (a, c) in p.terms() {
        if c.re.abs() > 1e-300 {
            out.add_term(a.clone(), C64::new(c.re, 0.0));
        }
    }
    out
}

/// Bergman kernel of the unit disk under `dA/π`: `(1 − z w̄)^{−2}`.
pub fn disk_kernel(z: C64, w: C64) -> Result<C64> {
    for p in [z, w] {
        if p.norm() >= 1.0 {
            return Err(Error::OutsideDisk(format!("{p}")));
        }
    }
    let d = C64::new(1.0, 0.0) - z * w.conj();
    Ok(1.0 / (d * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_monomial_values() {
        let f = BasisFamily::disk(4);
        assert_eq!(f.member(0).unwrap().value(&[0.3, 0.9]), C64::new(1.0, 0.0));
        assert!((f.member(3).unwrap().value(&[0.5, 0.0]) - C64::new(0.25, 0.0)).norm() < 1e-15);
        assert!(matches!(
            eval_basis(&BasisSpec::DiskMonomial, 4, 4, &[0.0, 0.0]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn planar_harmonic_order() {
        let f = BasisFamily::new(BasisSpec::harmonic2(), 5).unwrap();
        let labels: Vec<Vec<u32>> = f.labels().iter().map(|l| l.components().to_vec()).collect();
        assert_eq!(
            labels,
            vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]
        );
        let x = [0.3, -0.4];
        let z = C64::new(0.3, -0.4);
        assert!((f.member(3).unwrap().value(&x).re - (z * z).re).abs() < 1e-15);
        assert!((f.member(4).unwrap().value(&x).re - (z * z).im).abs() < 1e-15);
    }

    #[test]
    fn solid_harmonic_degree_one() {
        let f = BasisFamily::new(BasisSpec::Harmonic3, 4).unwrap();
        // C_1^1 is proportional to x
        let v = f.member(2).unwrap().value(&[0.1, 0.2, 0.3]).re;
        let u = f.member(2).unwrap().value(&[1.0, 0.0, 0.0]).re;
        assert!((v / u - 0.1).abs() < 1e-14);
        let count: usize = (0..=4).map(|l| solid_harmonics(l).len()).sum();
        assert_eq!(count, 25);
    }

    #[test]
    fn kernel_examples() {
        let w = C64::new(0.3, -0.5);
        assert_eq!(
            disk_kernel(C64::new(0.0, 0.0), w).unwrap(),
            C64::new(1.0, 0.0)
        );
        assert!(disk_kernel(C64::new(1.0, 0.0), w).is_err());
        let z = C64::new(0.3, 0.0);
        let fam = BasisFamily::disk(60);
        let x = [0.3, 0.0];
        let partial: C64 = fam
            .members()
            .iter()
            .map(|f| f.value(&x) * f.value(&x).conj())
            .sum();
        assert!((partial - disk_kernel(z, z).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn graded_lex_prefix_is_ordered() {
        let p = graded_lex_prefix(2, 6);
        assert_eq!(p.len(), 6);
        assert!(p.windows(2).all(|w| w[0].grlex_cmp(&w[1]).is_lt()));
    }
}
