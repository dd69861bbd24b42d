use faer::Mat;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Relative rank threshold used when none is configured.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub fn check_finite(m: &CMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn check_tolerance(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(rel_tol))
    }
}

// Decompositions go through faer; nalgebra's complex SVD loses accuracy on clustered spectra.
fn to_faer(m: &CMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn decomposition_failed(what: &str) -> Error {
    Error::InvalidArgument(format!("{what} did not converge"))
}

/// Singular values in non-increasing order, `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut s = to_faer(m)
        .singular_values()
        .map_err(|_| decomposition_failed("SVD"))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Thin SVD `m = U diag(s) Vᴴ`, singular values non-increasing.
pub fn thin_svd(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    check_finite(m)?;
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok((
            CMatrix::zeros(m.nrows(), 0),
            Vec::new(),
            CMatrix::zeros(m.ncols(), 0),
        ));
    }
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|_| decomposition_failed("SVD"))?;
    let (u, v) = (svd.U(), svd.V());
    let s: Vec<f64> = (0..k).map(|i| svd.S()[i].re).collect();
    Ok((
        CMatrix::from_fn(m.nrows(), k, |i, j| u[(i, j)]),
        s,
        CMatrix::from_fn(m.ncols(), k, |i, j| v[(i, j)]),
    ))
}

/// Count of `σ_i > rel_tol · σ_1`.
pub fn rank_from_singular_values(s: &[f64], rel_tol: f64) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> Result<usize> {
    check_tolerance(rel_tol)?;
    Ok(rank_from_singular_values(&singular_values(m)?, rel_tol))
}

/// `σ_1 / σ_min`, infinite for singular input.
pub fn condition_number(m: &CMatrix) -> Result<f64> {
    let s = singular_values(m)?;
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > 0.0 => Ok(a / b),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut e = to_faer(&h)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| decomposition_failed("Hermitian eigensolver"))?;
    e.sort_by(|a, b| a.total_cmp(b));
    Ok(e)
}

/// Eigenvalues of a general square complex matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    check_finite(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    to_faer(m)
        .eigenvalues()
        .map_err(|_| decomposition_failed("eigensolver"))
}

/// Moore–Penrose pseudoinverse with relative singular cutoff.
pub fn pseudo_inverse(m: &CMatrix, rel_cut: f64) -> Result<CMatrix> {
    let (u, s, v) = thin_svd(m)?;
    let cut = rel_cut * s.first().copied().unwrap_or(0.0);
    let inv: Vec<f64> = s
        .iter()
        .map(|&x| if x > cut && x > 0.0 { 1.0 / x } else { 0.0 })
        .collect();
    Ok(CMatrix::from_fn(m.ncols(), m.nrows(), |i, j| {
        (0..s.len())
            .map(|k| v[(i, k)] * inv[k] * u[(j, k)].conj())
            .sum()
    }))
}

/// Least-squares solution of `A x ≈ b`.
pub fn least_squares(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let pinv = pseudo_inverse(a, 1e-15)?;
    let rhs = DMatrix::from_column_slice(b.len(), 1, b);
    Ok((pinv * rhs).iter().copied().collect())
}

/// Singular values or eigenvalues together with the rank decision that was made from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub singular_values: Vec<f64>,
    /// Ascending, present for Hermitian input.
    pub eigenvalues: Option<Vec<f64>>,
    pub rel_tol: f64,
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
}

impl SpectrumReport {
    pub fn new(m: &CMatrix, rel_tol: f64, hermitian: bool) -> Result<Self> {
        check_tolerance(rel_tol)?;
        let s = singular_values(m)?;
        let eigenvalues = if hermitian {
            Some(hermitian_eigenvalues(m)?)
        } else {
            None
        };
        Ok(Self {
            rank: rank_from_singular_values(&s, rel_tol),
            singular_values: s,
            eigenvalues,
            rel_tol,
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && max_abs_diff(m, &m.adjoint()) <= tol
}
