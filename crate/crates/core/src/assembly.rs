//! Truncated Toeplitz matrices `entries[j][k] = ⟨F, f_j ḡ_k⟩`.
//!
//! Row `j` carries the input function `f_j`, column `k` the test function `g_k`,
//! so a matrix is the transpose of the usual operator matrix and the operator
//! product `X₁ X₂ ⋯ X_m` has matrix `M_m ⋯ M₂ M₁`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bases::{BasisFamily, BasisSpec};
use crate::error::{Error, Result};
use crate::func::Func;
use crate::numeric::{CMatrix, ExactComplex, ExactMatrix, MultiIndex, C64};
use crate::sparse::IndexSet;
use crate::weights::{radial_moment, Location, RadialDensity, RadialProfile, WeightSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact when both the weight and the bases allow it.
    #[default]
    Auto,
    Float,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub mode: Mode,
    /// Worker threads for entry fills; 1 keeps summation order fixed.
    pub threads: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Auto,
            threads: 1,
        }
    }
}

impl AssemblyOptions {
    pub fn float() -> Self {
        Self {
            mode: Mode::Float,
            ..Self::default()
        }
    }

    pub fn exact() -> Self {
        Self {
            mode: Mode::Exact,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Float(CMatrix),
    Exact(ExactMatrix),
}

impl Entries {
    pub fn nrows(&self) -> usize {
        match self {
            Entries::Float(m) => m.nrows(),
            Entries::Exact(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Entries::Float(m) => m.ncols(),
            Entries::Exact(m) => m.ncols(),
        }
    }

    pub fn to_float(&self) -> CMatrix {
        match self {
            Entries::Float(m) => m.clone(),
            Entries::Exact(m) => m.to_float(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Entries::Exact(_))
    }
}

/// Known sparsity pattern of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Structure {
    /// Nonzero only at `(s, s + delta)`.
    SingleShift { delta: i64 },
}

#[derive(Clone, Debug)]
pub struct ToeplitzMatrix {
    pub entries: Entries,
    pub row_labels: Vec<MultiIndex>,
    pub col_labels: Vec<MultiIndex>,
    pub weight: Option<Arc<WeightSpec>>,
    /// `(row basis, column basis)`.
    pub bases: Option<(BasisSpec, BasisSpec)>,
    pub structure: Option<Structure>,
    /// Row and column positions (in the parent truncation) that survived a restriction.
    pub window: Option<(Vec<usize>, Vec<usize>)>,
}

impl ToeplitzMatrix {
    pub fn from_float(m: CMatrix) -> Self {
        let (r, c) = m.shape();
        Self {
            entries: Entries::Float(m),
            row_labels: (0..r as u32).map(MultiIndex::scalar).collect(),
            col_labels: (0..c as u32).map(MultiIndex::scalar).collect(),
            weight: None,
            bases: None,
            structure: None,
            window: None,
        }
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.is_exact()
    }

    pub fn to_float(&self) -> CMatrix {
        self.entries.to_float()
    }

    pub fn exact(&self) -> Option<&ExactMatrix> {
        match &self.entries {
            Entries::Exact(m) => Some(m),
            Entries::Float(_) => None,
        }
    }

    /// Restriction to the given row and column positions, order preserved.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries = match &self.entries {
            Entries::Float(m) => {
                Entries::Float(CMatrix::from_fn(rows.len(), cols.len(), |i, j| {
                    m[(rows[i], cols[j])]
                }))
            }
            Entries::Exact(m) => Entries::Exact(m.submatrix(rows, cols)),
        };
        let (pr, pc) = match &self.window {
            Some((r, c)) => (
                rows.iter().map(|&i| r[i]).collect(),
                cols.iter().map(|&j| c[j]).collect(),
            ),
            None => (rows.to_vec(), cols.to_vec()),
        };
        Self {
            entries,
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: cols.iter().map(|&j| self.col_labels[j].clone()).collect(),
            weight: self.weight.clone(),
            bases: self.bases.clone(),
            structure: None,
            window: Some((pr, pc)),
        }
    }

    /// Leading `n × n` block.
    pub fn leading(&self, n: usize) -> Self {
        let idx: Vec<usize> = (0..n.min(self.nrows()).min(self.ncols())).collect();
        self.select(&idx, &idx)
    }
}

fn check_support(f: &WeightSpec, rows: &BasisSpec, cols: &BasisSpec) -> Result<()> {
    f.validate()?;
    let need = rows.real_dim().max(cols.real_dim());
    let dim_of = |f: &WeightSpec| -> Option<usize> {
        match f {
            WeightSpec::Points(p) => p.terms.first().map(|t| t.at.real_dim()),
            WeightSpec::Radial(r) => Some(r.dim),
            WeightSpec::Polynomial(_) => Some(2),
            WeightSpec::Grid(g) => Some(g.dim()),
        }
    };
    if let Some(d) = dim_of(f) {
        if d != need {
            return Err(Error::SupportMismatch(format!(
                "weight lives in R^{d}, basis in R^{need}"
            )));
        }
    }
    if rows.lives_on_disk() || cols.lives_on_disk() {
        // each complex coordinate must stay in the closed unit disk; points strictly inside
        let bad = match f {
            WeightSpec::Points(p) => p.terms.iter().any(|t| {
                let x = t.at.coords();
                x.chunks(2)
                    .any(|c| c[0].hypot(*c.get(1).unwrap_or(&0.0)) >= 1.0)
            }),
            _ => f.extent() > 1.0 + 1e-15,
        };
        if bad {
            return Err(Error::SupportMismatch(
                "weight support leaves the unit disk".into(),
            ));
        }
    }
    Ok(())
}

/// `⟨F, f_j ḡ_k⟩` for one pair of functions.
pub fn entry(f: &WeightSpec, fj: &Func, gk: &Func) -> Result<C64> {
    f.pair(&fj.mul_conj(gk)?)
}

fn exact_allowed(f: &WeightSpec, rows: &BasisSpec, cols: &BasisSpec) -> bool {
    rows.is_exact() && cols.is_exact() && f.is_exact()
}

pub fn assemble(f: &WeightSpec, rows: &BasisFamily, cols: &BasisFamily) -> Result<ToeplitzMatrix> {
    assemble_with(f, rows, cols, AssemblyOptions::default())
}

pub fn assemble_with(
    f: &WeightSpec,
    rows: &BasisFamily,
    cols: &BasisFamily,
    opts: AssemblyOptions,
) -> Result<ToeplitzMatrix> {
    check_support(f, rows.spec(), cols.spec())?;
    let exact = match opts.mode {
        Mode::Auto => exact_allowed(f, rows.spec(), cols.spec()),
        Mode::Float => false,
        Mode::Exact => {
            if !exact_allowed(f, rows.spec(), cols.spec()) {
                return Err(Error::NotExact(
                    "exact mode needs raw monomial bases and a polynomial density or complex point masses".into(),
                ));
            }
            true
        }
    };
    let entries = if exact {
        Entries::Exact(assemble_exact(f, rows, cols, opts.threads)?)
    } else {
        Entries::Float(assemble_float(f, rows, cols, opts.threads)?)
    };
    Ok(ToeplitzMatrix {
        entries,
        row_labels: rows.labels().to_vec(),
        col_labels: cols.labels().to_vec(),
        weight: Some(Arc::new(f.clone())),
        bases: Some((rows.spec().clone(), cols.spec().clone())),
        structure: None,
        window: None,
    })
}

/// Runs `work(row)` for every row, optionally over scoped threads; output order is row order.
fn par_rows<T: Send>(
    n: usize,
    threads: usize,
    work: impl Fn(usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        return (0..n).map(&work).collect();
    }
    let chunk = n.div_ceil(threads);
    let results: Vec<Result<Vec<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let work = &work;
                s.spawn(move || {
                    (t * chunk..((t + 1) * chunk).min(n))
                        .map(work)
                        .collect::<Result<Vec<T>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(n);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn assemble_exact(
    f: &WeightSpec,
    rows: &BasisFamily,
    cols: &BasisFamily,
    threads: usize,
) -> Result<ExactMatrix> {
    let (r, c) = (rows.len(), cols.len());
    let data = par_rows(r, threads, |j| {
        (0..c)
            .map(|k| f.moment_exact(&rows.labels()[j], &cols.labels()[k]))
            .collect::<Result<Vec<ExactComplex>>>()
    })?;
    Ok(ExactMatrix::from_rows(data))
}

fn assemble_float(
    f: &WeightSpec,
    rows: &BasisFamily,
    cols: &BasisFamily,
    threads: usize,
) -> Result<CMatrix> {
    if matches!(f, WeightSpec::Polynomial(_)) && rows.spec().is_exact() && cols.spec().is_exact() {
        return assemble_entrywise(f, rows.members(), cols.members(), threads);
    }
    assemble_functions(f, rows.members(), cols.members(), threads)
}

fn assemble_entrywise(
    f: &WeightSpec,
    rows: &[Func],
    cols: &[Func],
    threads: usize,
) -> Result<CMatrix> {
    let data = par_rows(rows.len(), threads, |j| {
        cols.iter()
            .map(|g| entry(f, &rows[j], g))
            .collect::<Result<Vec<C64>>>()
    })?;
    let m = CMatrix::from_fn(rows.len(), cols.len(), |j, k| data[j][k]);
    crate::numeric::linalg::check_finite(&m)?;
    Ok(m)
}

/// Float matrix `⟨F, f_j ḡ_k⟩` for arbitrary function lists.
///
/// Densities share one quadrature sized for the highest-degree pair; point
/// distributions are evaluated entry by entry.
pub fn assemble_functions(
    f: &WeightSpec,
    rows: &[Func],
    cols: &[Func],
    threads: usize,
) -> Result<CMatrix> {
    let (r, c) = (rows.len(), cols.len());
    if r == 0 || c == 0 {
        return Ok(CMatrix::zeros(r, c));
    }
    let radius = f.extent();
    let degree_of = |fs: &[Func]| -> Result<u32> {
        fs.iter().try_fold(0u32, |acc, g| {
            g.quad_degree(radius)
                .map(|d| acc.max(d))
                .ok_or_else(|| Error::NotEvaluable("basis function of unknown degree".into()))
        })
    };
    let nodes = match f {
        WeightSpec::Points(_) => None,
        _ => f.nodes(degree_of(rows)? + degree_of(cols)?)?,
    };
    let Some(nodes) = nodes else {
        return assemble_entrywise(f, rows, cols, threads);
    };
    let fv = par_rows(r, threads, |j| {
        Ok(nodes
            .iter()
            .map(|(x, w)| w * rows[j].value(x))
            .collect::<Vec<C64>>())
    })?;
    let gv = par_rows(c, threads, |k| {
        Ok(nodes
            .iter()
            .map(|(x, _)| cols[k].value(x).conj())
            .collect::<Vec<C64>>())
    })?;
    let a = CMatrix::from_fn(r, nodes.len(), |j, q| fv[j][q]);
    let b = CMatrix::from_fn(nodes.len(), c, |q, k| gv[k][q]);
    let m = a * b;
    crate::numeric::linalg::check_finite(&m)?;
    Ok(m)
}

/// `T_g` for `g(z) = f(|z|) z^α z̄^β` on disk monomials from the closed form
/// `(T_g e_s, e_t) = 2√((s+1)(t+1)) f̂(s+t+α+β+1)` at `t = s + α − β`.
pub fn assemble_radial_monomial(
    profile: &RadialProfile,
    support_radius: f64,
    alpha: u32,
    beta: u32,
    n: usize,
) -> Result<ToeplitzMatrix> {
    if support_radius > 1.0 {
        return Err(Error::SupportMismatch(
            "radial profile must live in the unit disk".into(),
        ));
    }
    let delta = i64::from(alpha) - i64::from(beta);
    let mut m = CMatrix::zeros(n, n);
    for s in 0..n {
        let t = s as i64 + delta;
        if t < 0 || t >= n as i64 {
            continue;
        }
        m[(s, t as usize)] = C64::new(
            radial_closed_form_entry(profile, support_radius, alpha, beta, s as u32, t as u32)?,
            0.0,
        );
    }
    let labels: Vec<MultiIndex> = (0..n as u32).map(MultiIndex::scalar).collect();
    Ok(ToeplitzMatrix {
        entries: Entries::Float(m),
        row_labels: labels.clone(),
        col_labels: labels,
        weight: Some(Arc::new(WeightSpec::Radial(
            RadialDensity::disk(profile.clone(), support_radius).with_angular(alpha, beta),
        ))),
        bases: Some((BasisSpec::DiskMonomial, BasisSpec::DiskMonomial)),
        structure: Some(Structure::SingleShift { delta }),
        window: None,
    })
}

fn radial_closed_form_entry(
    profile: &RadialProfile,
    support_radius: f64,
    alpha: u32,
    beta: u32,
    s: u32,
    t: u32,
) -> Result<f64> {
    let l = s + t + alpha + beta + 1;
    Ok(2.0
        * (f64::from(s + 1) * f64::from(t + 1)).sqrt()
        * radial_moment(profile, support_radius, l)?)
}

/// Drops the rows and columns whose labels lie in `J`.
pub fn reduced_matrix(m: &ToeplitzMatrix, j: &IndexSet) -> Result<ToeplitzMatrix> {
    let rows: Vec<usize> = (0..m.nrows())
        .filter(|&i| !j.contains(&m.row_labels[i]))
        .collect();
    let cols: Vec<usize> = (0..m.ncols())
        .filter(|&i| !j.contains(&m.col_labels[i]))
        .collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::EmptyReduction);
    }
    Ok(m.select(&rows, &cols))
}

fn shift_of(m: &ToeplitzMatrix) -> Result<i64> {
    match m.structure {
        Some(Structure::SingleShift { delta }) => Ok(delta),
        None => Err(Error::InvalidProduct(
            "side factors must have single-shift structure; generic truncated products are refused"
                .into(),
        )),
    }
}

/// Matrix of `L₁ ⋯ L_p T_F R₁ ⋯ R_q` restricted to the rows and columns where
/// every intermediate index stays inside the truncation, so the entries are exact.
pub fn shift_exact_product(
    left: &[ToeplitzMatrix],
    middle: &ToeplitzMatrix,
    right: &[ToeplitzMatrix],
) -> Result<ToeplitzMatrix> {
    let n = middle.nrows();
    if middle.ncols() != n {
        return Err(Error::InvalidProduct("middle factor must be square".into()));
    }
    for f in left.iter().chain(right) {
        if f.nrows() != n || f.ncols() != n {
            return Err(Error::InvalidProduct(
                "all factors need the same truncation".into(),
            ));
        }
    }
    let dl: Vec<i64> = left.iter().map(shift_of).collect::<Result<_>>()?;
    let dr: Vec<i64> = right.iter().map(shift_of).collect::<Result<_>>()?;
    let within = |start: i64, steps: &mut dyn Iterator<Item = i64>| -> bool {
        let mut p = start;
        for d in steps {
            p += d;
            if p < 0 {
                // the chain hits a structural zero: the entry is exactly 0
                return true;
            }
            if p >= n as i64 {
                return false;
            }
        }
        true
    };
    // R_q acts first on e_j
    let rows: Vec<usize> = (0..n)
        .filter(|&j| within(j as i64, &mut dr.iter().rev().copied()))
        .collect();
    // a nonzero (j, k) entry passes through L_1 last, so walk back from k
    let cols: Vec<usize> = (0..n)
        .filter(|&k| within(k as i64, &mut dl.iter().map(|d| -d)))
        .collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidProduct(
            "no index window survives the shifts".into(),
        ));
    }
    let mut acc = middle.to_float();
    for r in right {
        acc = r.to_float() * acc;
    }
    for l in left {
        acc *= l.to_float();
    }
    let whole = ToeplitzMatrix {
        entries: Entries::Float(acc),
        row_labels: middle.row_labels.clone(),
        col_labels: middle.col_labels.clone(),
        weight: None,
        bases: middle.bases.clone(),
        structure: middle.structure.map(|Structure::SingleShift { delta }| {
            Structure::SingleShift {
                delta: delta + dl.iter().sum::<i64>() + dr.iter().sum::<i64>(),
            }
        }),
        window: None,
    };
    let structure = whole.structure;
    let mut out = whole.select(&rows, &cols);
    out.structure = structure.filter(|_| rows.len() == n && cols.len() == n);
    Ok(out)
}

/// Point masses `Σ c_q δ_{z_q}` on `C¹` as a weight.
pub fn point_masses(points: &[(C64, C64)]) -> WeightSpec {
    WeightSpec::Points(crate::weights::PointDistribution::masses(points))
}

/// The location of every term, for diagnostics.
pub fn term_locations(f: &WeightSpec) -> Vec<Location> {
    match f {
        WeightSpec::Points(p) => p.locations(),
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{exact_rank, max_abs_diff, numerical_rank};
    use crate::weights::PolynomialDensity;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn point_mass_is_outer_product() {
        let z0 = c(0.3, 0.4);
        let m = assemble(
            &point_masses(&[(z0, c(1.0, 0.0))]),
            &BasisFamily::disk(6),
            &BasisFamily::disk(6),
        )
        .unwrap();
        let e = |s: u32| crate::numeric::cpow(z0, s) * f64::from(s + 1).sqrt();
        let a = m.to_float();
        for j in 0..6 {
            for k in 0..6 {
                assert!((a[(j, k)] - e(j as u32) * e(k as u32).conj()).norm() < 1e-14);
            }
        }
        assert_eq!(numerical_rank(&a, 1e-10).unwrap(), 1);
    }

    #[test]
    fn unit_density_gives_identity() {
        let f = WeightSpec::Radial(RadialDensity::disk(RadialProfile::constant(1.0), 1.0));
        let m = assemble(&f, &BasisFamily::disk(10), &BasisFamily::disk(10)).unwrap();
        assert!(max_abs_diff(&m.to_float(), &CMatrix::identity(10, 10)) < 1e-13);
    }

    #[test]
    fn exact_disk_moments() {
        let f = WeightSpec::Polynomial(PolynomialDensity::one_on_unit_disk());
        let m = assemble(&f, &BasisFamily::monomial(10), &BasisFamily::monomial(10)).unwrap();
        let e = m.exact().unwrap();
        assert_eq!(e.get(3, 3), &ExactComplex::from_ratio(1, 4));
        assert_eq!(exact_rank(e), 10);
    }

    #[test]
    fn closed_form_hand_value() {
        let m = assemble_radial_monomial(&RadialProfile::constant(1.0), 1.0, 1, 0, 4).unwrap();
        // f̂(0 + 1 + 1 + 0 + 1) = 1/4
        assert!((m.to_float()[(0, 1)].re - 2.0 * 2f64.sqrt() / 4.0).abs() < 1e-15);
        let id = assemble_radial_monomial(&RadialProfile::constant(1.0), 1.0, 0, 0, 8).unwrap();
        assert!(max_abs_diff(&id.to_float(), &CMatrix::identity(8, 8)) < 1e-12);
    }

    #[test]
    fn reduction() {
        let m = assemble(
            &point_masses(&[(c(0.5, 0.1), c(1.0, 0.0))]),
            &BasisFamily::disk(8),
            &BasisFamily::disk(8),
        )
        .unwrap();
        assert_eq!(
            reduced_matrix(&m, &IndexSet::Empty).unwrap().to_float(),
            m.to_float()
        );
        let all_but_one = IndexSet::predicate(|a| a.get(0) != 3);
        assert_eq!(reduced_matrix(&m, &all_but_one).unwrap().nrows(), 1);
        let even = reduced_matrix(&m, &IndexSet::multiples(2)).unwrap();
        assert_eq!(numerical_rank(&even.to_float(), 1e-10).unwrap(), 1);
        assert!(matches!(
            reduced_matrix(&m, &IndexSet::All),
            Err(Error::EmptyReduction)
        ));
    }

    #[test]
    fn products() {
        let n = 10;
        let id = assemble_radial_monomial(&RadialProfile::constant(1.0), 1.0, 0, 0, n).unwrap();
        let mid = assemble(
            &point_masses(&[(c(0.2, 0.5), c(1.0, 0.0))]),
            &BasisFamily::disk(n),
            &BasisFamily::disk(n),
        )
        .unwrap();
        let p = shift_exact_product(std::slice::from_ref(&id), &mid, &[]).unwrap();
        assert!(max_abs_diff(&p.to_float(), &mid.to_float()) < 1e-14);
        let g = assemble_radial_monomial(&RadialProfile::constant(1.0), 0.9, 1, 0, n).unwrap();
        let p = shift_exact_product(std::slice::from_ref(&g), &mid, &[]).unwrap();
        assert!(numerical_rank(&p.to_float(), 1e-10).unwrap() <= 1);
        let h = assemble_radial_monomial(
            &RadialProfile::Polynomial {
                coeffs: vec![0.0, 0.0, 1.0],
            },
            1.0,
            0,
            2,
            n,
        )
        .unwrap();
        let p = shift_exact_product(std::slice::from_ref(&g), &h, &[]).unwrap();
        let a = p.to_float();
        for (i, &j) in p.window.as_ref().unwrap().0.iter().enumerate() {
            for (l, &k) in p.window.as_ref().unwrap().1.iter().enumerate() {
                if k as i64 != j as i64 - 1 {
                    assert_eq!(a[(i, l)], c(0.0, 0.0));
                }
            }
        }
        assert!(shift_exact_product(std::slice::from_ref(&mid), &mid, &[]).is_err());
    }
}
