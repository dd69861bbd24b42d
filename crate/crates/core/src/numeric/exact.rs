//! Gaussian rationals and exact rank.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::C64;
use crate::error::{Error, Result};

/// A complex number with arbitrary-precision rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_gaussian(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    /// Exact binary value of a finite float pair.
    pub fn from_c64(z: C64) -> Option<Self> {
        Some(Self::new(
            BigRational::from_float(z.re)?,
            BigRational::from_float(z.im)?,
        ))
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Some(Self::new(num.re / &n, num.im / n))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &ExactComplex {
    type Output = ExactComplex;
    fn div(self, rhs: &ExactComplex) -> ExactComplex {
        self.checked_div(rhs).expect("division by exact zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactComplex {
            type Output = ExactComplex;
            fn $m(self, rhs: ExactComplex) -> ExactComplex {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactComplex> for ExactComplex {
    fn add_assign(&mut self, rhs: &ExactComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ExactComplex> for ExactComplex {
    fn sub_assign(&mut self, rhs: &ExactComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&ExactComplex> for ExactComplex {
    fn mul_assign(&mut self, rhs: &ExactComplex) {
        *self = &*self * rhs;
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re, -self.im)
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parses a rational written as `p`, `p/q` or a decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    // Decimal notation is read exactly in base 10.
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("not a rational: {s:?}")))?;
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

impl Serialize for ExactComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re.to_string(), self.im.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([String; 2]),
            Real(String),
            Int(i64),
        }
        let (re, im) = match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => (re, im),
            Repr::Real(re) => (re, "0".to_string()),
            Repr::Int(n) => (n.to_string(), "0".to_string()),
        };
        let re = parse_rational(&re).map_err(serde::de::Error::custom)?;
        let im = parse_rational(&im).map_err(serde::de::Error::custom)?;
        Ok(ExactComplex::new(re, im))
    }
}

/// Dense row-major matrix of Gaussian rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactComplex>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ExactComplex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                ExactComplex::one()
            } else {
                ExactComplex::zero()
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ExactComplex,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<ExactComplex>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactComplex {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactComplex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_float(&self) -> super::CMatrix {
        super::CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }
}

/// Gaussian integer used inside the fraction-free elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    /// Division known to be exact in `Z[i]`.
    fn exact_div(&self, o: &Self) -> Self {
        let n = &o.re * &o.re + &o.im * &o.im;
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        debug_assert!(re.is_multiple_of(&n) && im.is_multiple_of(&n));
        Self {
            re: re / &n,
            im: im / n,
        }
    }
}

/// Exact rank by fraction-free (Bareiss) elimination over the Gaussian integers.
///
/// Each row is first scaled by the common denominator of its entries, which
/// leaves the rank unchanged.
pub fn exact_rank(m: &ExactMatrix) -> usize {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a: Vec<Vec<GaussInt>> = (0..rows)
        .map(|i| {
            let lcm = (0..cols).fold(BigInt::one(), |acc, j| {
                let e = m.get(i, j);
                acc.lcm(e.re.denom()).lcm(e.im.denom())
            });
            (0..cols)
                .map(|j| {
                    let e = m.get(i, j);
                    GaussInt {
                        re: e.re.numer() * (&lcm / e.re.denom()),
                        im: e.im.numer() * (&lcm / e.im.denom()),
                    }
                })
                .collect()
        })
        .collect();

    let mut prev = GaussInt {
        re: BigInt::one(),
        im: BigInt::zero(),
    };
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..rows {
            let lead = a[r][col].clone();
            for c in col + 1..cols {
                let v = pivot.mul(&a[r][c]).sub(&lead.mul(&a[rank][c]));
                a[r][c] = v.exact_div(&prev);
            }
            a[r][col] = GaussInt {
                re: BigInt::zero(),
                im: BigInt::zero(),
            };
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactComplex {
        ExactComplex::from_ratio(n, d)
    }

    #[test]
    fn field_operations() {
        let a = ExactComplex::new(
            BigRational::new(1.into(), 2.into()),
            BigRational::from_integer(3.into()),
        );
        let b = ExactComplex::from_gaussian(2, -1);
        let prod = &a * &b;
        assert_eq!(
            prod,
            ExactComplex::new(
                BigRational::new(4.into(), 1.into()),
                BigRational::new(11.into(), 2.into())
            )
        );
        assert_eq!(&prod / &b, a);
        assert!(ExactComplex::zero()
            .checked_div(&ExactComplex::zero())
            .is_none());
        assert_eq!(ExactComplex::i().pow(4), ExactComplex::one());
        assert_eq!(
            ExactComplex::from_c64(C64::new(0.5, -0.25)).unwrap(),
            ExactComplex::new(
                BigRational::new(1.into(), 2.into()),
                BigRational::new((-1).into(), 4.into())
            )
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank(&ExactMatrix::identity(4)), 4);
        let m = ExactMatrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]);
        assert_eq!(exact_rank(&m), 1);
        // diag 1/(k+1)
        let d = ExactMatrix::from_fn(10, 10, |i, j| {
            if i == j {
                q(1, i as i64 + 1)
            } else {
                ExactComplex::zero()
            }
        });
        assert_eq!(exact_rank(&d), 10);
        assert_eq!(exact_rank(&ExactMatrix::zeros(3, 5)), 0);
    }

    #[test]
    fn rank_with_complex_dependencies() {
        // third row = i·row0 + (1/3)·row1
        let r0 = vec![
            ExactComplex::from_gaussian(1, 1),
            q(2, 3),
            ExactComplex::i(),
        ];
        let r1 = vec![q(5, 7), ExactComplex::from_gaussian(0, -2), q(1, 1)];
        let r2: Vec<_> = r0
            .iter()
            .zip(&r1)
            .map(|(a, b)| &(a * &ExactComplex::i()) + &(b * &q(1, 3)))
            .collect();
        let m = ExactMatrix::from_rows(vec![r0, r1, r2]);
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(exact_rank(&m.conj_transpose()), 2);
    }

    #[test]
    fn skipped_pivot_columns() {
        let m = ExactMatrix::from_rows(vec![
            vec![q(0, 1), q(1, 1), q(2, 1), q(3, 1)],
            vec![q(0, 1), q(2, 1), q(4, 1), q(7, 1)],
            vec![q(0, 1), q(3, 1), q(6, 1), q(10, 1)],
        ]);
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(
            parse_rational("3/4").unwrap(),
            BigRational::new(3.into(), 4.into())
        );
        assert_eq!(
            parse_rational("-0.25").unwrap(),
            BigRational::new((-1).into(), 4.into())
        );
        assert_eq!(
            parse_rational("7").unwrap(),
            BigRational::from_integer(7.into())
        );
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(ExactComplex::from_gaussian(1, -2).to_string(), "1-2i");
        assert_eq!(q(1, 3).to_string(), "1/3");
    }
}
