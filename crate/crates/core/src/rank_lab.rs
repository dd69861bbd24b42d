//! Finite-rank rigidity machinery: the Vandermonde vanishing oracle, the
//! symmetric-polynomial differential witness, and Prony recovery of point masses.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::assembly::{Entries, ToeplitzMatrix};
use crate::bases::BasisSpec;
use crate::error::{Error, Result};
use crate::numeric::{
    condition_number, eigenvalues, exact_rank, least_squares, numerical_rank, pseudo_inverse,
    thin_svd, CMatrix, ExactComplex, ExactMatrix, MultiIndex, C64,
};
use crate::weights::{Location, PointDistribution, WeightSpec};

/// An exact point mass of a finite functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: Vec<ExactComplex>,
    pub coeff: ExactComplex,
}

/// `φ = Σ c_a δ_{z_a}` acting on polynomials in `(z, z̄)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteFunctional {
    pub atoms: Vec<Atom>,
}

impl FiniteFunctional {
    pub fn new() -> Self {
        Self::default()
    }

    /// Atoms in `C¹` from `(location, coefficient)` pairs.
    pub fn planar(atoms: &[(ExactComplex, ExactComplex)]) -> Self {
        Self {
            atoms: atoms
                .iter()
                .map(|(z, c)| Atom {
                    at: vec![z.clone()],
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn with_atom(mut self, at: Vec<ExactComplex>, coeff: ExactComplex) -> Self {
        self.atoms.push(Atom { at, coeff });
        self
    }

    /// Exact copy of a pure point-mass distribution; every float must be exactly representable.
    pub fn from_points(p: &PointDistribution) -> Result<Self> {
        let mut out = Self::new();
        for t in &p.terms {
            if !t.holo.is_zero() || !t.antiholo.is_zero() {
                return Err(Error::InvalidWeight(
                    "finite functionals carry no derivative terms".into(),
                ));
            }
            let Location::Complex(z) = &t.at else {
                return Err(Error::InvalidWeight(
                    "finite functionals need complex locations".into(),
                ));
            };
            let exact = |v: C64| {
                ExactComplex::from_c64(v)
                    .ok_or_else(|| Error::NotExact(format!("{v} is not finite")))
            };
            let at = z.iter().map(|&v| exact(v)).collect::<Result<Vec<_>>>()?;
            out.atoms.push(Atom {
                at,
                coeff: exact(t.coeff)?,
            });
        }
        Ok(out)
    }

    pub fn to_weight(&self) -> WeightSpec {
        let mut p = PointDistribution::new();
        for a in &self.atoms {
            p = p.with_mass(
                Location::Complex(a.at.iter().map(ExactComplex::to_c64).collect()),
                a.coeff.to_c64(),
            );
        }
        WeightSpec::Points(p)
    }

    pub fn dim(&self) -> usize {
        self.atoms.first().map_or(1, |a| a.at.len())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `φ(z^a z̄^b)`.
    pub fn apply(&self, a: &MultiIndex, b: &MultiIndex) -> ExactComplex {
        let mut acc = ExactComplex::zero();
        for atom in &self.atoms {
            acc += &(&atom.coeff * &(&zpow(&atom.at, a) * &zpow(&atom.at, b).conj()));
        }
        acc
    }

    /// `A[i][j] = φ(z^{e_i} z̄^{e_j})`.
    pub fn moment_matrix(&self, exponents: &[MultiIndex]) -> ExactMatrix {
        ExactMatrix::from_fn(exponents.len(), exponents.len(), |i, j| {
            self.apply(&exponents[i], &exponents[j])
        })
    }

    fn check_dims(&self) -> Result<()> {
        let d = self.dim();
        match self.atoms.iter().find(|a| a.at.len() != d) {
            Some(a) => Err(Error::DimensionMismatch {
                expected: d,
                found: a.at.len(),
            }),
            None => Ok(()),
        }
    }
}

fn zpow(z: &[ExactComplex], a: &MultiIndex) -> ExactComplex {
    let mut acc = ExactComplex::one();
    for (i, zi) in z.iter().enumerate() {
        let k = a.get(i);
        if k > 0 {
            acc *= &zi.pow(k);
        }
    }
    acc
}

/// Caps on brute-force expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpansionBudget {
    /// Cap on `N! · atoms^N`.
    pub max_terms: u128,
    /// Cap on the number of `(J, K)` pairs in an equivalence check.
    pub max_conditions: u128,
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        // N = 4, four atoms
        Self {
            max_terms: 24 * 256,
            max_conditions: 4_000_000,
        }
    }
}

/// `N! · atoms^N`, saturating.
pub fn expansion_cost(n: usize, atoms: usize) -> u128 {
    let mut c: u128 = 1;
    for k in 1..=n as u128 {
        c = c.saturating_mul(k);
    }
    for _ in 0..n {
        c = c.saturating_mul(atoms as u128);
    }
    c
}

fn check_cost(n: usize, atoms: usize, budget: &ExpansionBudget) -> Result<u128> {
    let cost = expansion_cost(n, atoms);
    if cost > budget.max_terms {
        return Err(Error::BudgetExceeded {
            cost,
            cap: budget.max_terms,
        });
    }
    Ok(cost)
}

/// Permutations of `0..n` with their signs, in lexicographic order.
fn permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    fn go(
        prefix: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sign: i8,
        out: &mut Vec<(Vec<usize>, i8)>,
    ) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), sign));
            return;
        }
        // choosing the r-th unused element contributes r transpositions
        let mut rank = 0;
        for v in 0..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            prefix.push(v);
            go(prefix, used, if rank % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            used[v] = false;
            rank += 1;
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], 1, &mut out);
    out
}

/// Assignments `{1..N} → atoms`, odometer order, first slot slowest.
fn assignments(n: usize, atoms: usize) -> Vec<Vec<usize>> {
    if atoms == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < atoms {
                break;
            }
            cur[i] = 0;
        }
    }
}

fn has_repeat(a: &[usize]) -> bool {
    a.iter().enumerate().any(|(i, x)| a[..i].contains(x))
}

/// `φ^{⊗N}(Π z_i^{j_i} · det(z̄_i^{k_l}))` by expansion over atom assignments and permutations.
pub fn vandermonde_vanishing(
    phi: &FiniteFunctional,
    j: &[MultiIndex],
    k: &[MultiIndex],
    budget: &ExpansionBudget,
) -> Result<ExactComplex> {
    phi.check_dims()?;
    if j.len() != k.len() || j.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "exponent lists need equal positive length, got {} and {}",
            j.len(),
            k.len()
        )));
    }
    let n = j.len();
    check_cost(n, phi.len(), budget)?;
    let perms = permutations(n);
    let mut acc = ExactComplex::zero();
    for a in assignments(n, phi.len()) {
        // two slots on one atom give two equal determinant rows
        if has_repeat(&a) {
            continue;
        }
        let mut p = ExactComplex::one();
        for (slot, &atom) in a.iter().enumerate() {
            let at = &phi.atoms[atom];
            p *= &(&at.coeff * &zpow(&at.at, &j[slot]));
        }
        if p.is_zero() {
            continue;
        }
        let d = det_by_permutations(&perms, |slot, col| {
            zpow(&phi.atoms[a[slot]].at, &k[col]).conj()
        });
        acc += &(&p * &d);
    }
    Ok(acc)
}

fn det_by_permutations(
    perms: &[(Vec<usize>, i8)],
    entry: impl Fn(usize, usize) -> ExactComplex,
) -> ExactComplex {
    let mut acc = ExactComplex::zero();
    for (sigma, sign) in perms {
        let mut t = ExactComplex::one();
        for (row, &col) in sigma.iter().enumerate() {
            t *= &entry(row, col);
            if t.is_zero() {
                break;
            }
        }
        if *sign > 0 {
            acc += &t;
        } else {
            acc -= &t;
        }
    }
    acc
}

/// Strictly increasing `n`-subsets of `0..len`, lexicographic.
fn increasing_tuples(len: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n > len {
        return out;
    }
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < len - n + i {
                cur[i] += 1;
                for t in i + 1..n {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c.saturating_mul(n as u128 - i) / (i + 1);
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub r: usize,
    pub degree_bound: u32,
    pub exact_rank: usize,
    /// Number of `(J, K)` pairs evaluated before the verdict.
    pub conditions_checked: u128,
    pub all_vanish: bool,
    /// First non-vanishing `(J, K)` and its value.
    pub witness: Option<(Vec<MultiIndex>, Vec<MultiIndex>, ExactComplex)>,
    pub expansion_cost: u128,
    /// `rank ≤ r ⟺ all conditions vanish`.
    pub biconditional: bool,
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "r={}", self.r)?;
        writeln!(f, "degree_bound={}", self.degree_bound)?;
        writeln!(f, "exact_rank={}", self.exact_rank)?;
        writeln!(f, "expansion_cost={}", self.expansion_cost)?;
        writeln!(f, "conditions_checked={}", self.conditions_checked)?;
        writeln!(f, "all_vanish={}", self.all_vanish)?;
        if let Some((j, k, v)) = &self.witness {
            let show = |e: &[MultiIndex]| {
                e.iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(f, "witness_j={}", show(j))?;
            writeln!(f, "witness_k={}", show(k))?;
            writeln!(f, "witness_value={v}")?;
        }
        write!(
            f,
            "biconditional={}",
            if self.biconditional { "pass" } else { "fail" }
        )
    }
}

/// Compares the exact rank of the moment matrix over `|α| ≤ degree_bound` with the
/// vanishing conditions of size `N = r + 1` over the same exponents.
///
/// Reordering `J` or `K` only flips the sign of a condition and a repeated entry
/// makes it vanish, so strictly increasing tuples exhaust all conditions.
pub fn check_lemma_equivalence(
    phi: &FiniteFunctional,
    r: usize,
    degree_bound: u32,
    budget: &ExpansionBudget,
) -> Result<LemmaReport> {
    phi.check_dims()?;
    if (degree_bound as usize) < r + 1 {
        return Err(Error::InvalidArgument(format!(
            "degree bound {degree_bound} must be at least r + 1 = {}",
            r + 1
        )));
    }
    let n = r + 1;
    let cost = check_cost(n, phi.len(), budget)?;
    let exps = MultiIndex::graded_lex(phi.dim(), degree_bound);
    let tuples = increasing_tuples(exps.len(), n);
    let pairs = binomial_u128(exps.len(), n).saturating_mul(binomial_u128(exps.len(), n));
    if pairs > budget.max_conditions {
        return Err(Error::BudgetExceeded {
            cost: pairs,
            cap: budget.max_conditions,
        });
    }
    let rank = exact_rank(&phi.moment_matrix(&exps));

    let injective: Vec<Vec<usize>> = assignments(n, phi.len())
        .into_iter()
        .filter(|a| !has_repeat(a))
        .collect();
    let perms = permutations(n);
    let zp: Vec<Vec<ExactComplex>> = phi
        .atoms
        .iter()
        .map(|a| exps.iter().map(|e| zpow(&a.at, e)).collect())
        .collect();
    let zbar: Vec<Vec<ExactComplex>> = zp
        .iter()
        .map(|row| row.iter().map(ExactComplex::conj).collect())
        .collect();
    // P_J(a) = Π c_{a_i} z_{a_i}^{j_i}
    let p_table: Vec<Vec<ExactComplex>> = tuples
        .iter()
        .map(|jt| {
            injective
                .iter()
                .map(|a| {
                    let mut p = ExactComplex::one();
                    for (slot, &atom) in a.iter().enumerate() {
                        p *= &(&phi.atoms[atom].coeff * &zp[atom][jt[slot]]);
                    }
                    p
                })
                .collect()
        })
        .collect();

    let mut checked: u128 = 0;
    let mut witness = None;
    'outer: for kt in &tuples {
        let d: Vec<ExactComplex> = injective
            .iter()
            .map(|a| det_by_permutations(&perms, |slot, col| zbar[a[slot]][kt[col]].clone()))
            .collect();
        for (ji, jt) in tuples.iter().enumerate() {
            checked += 1;
            let mut v = ExactComplex::zero();
            for (ai, dv) in d.iter().enumerate() {
                if !dv.is_zero() {
                    v += &(&p_table[ji][ai] * dv);
                }
            }
            if !v.is_zero() {
                witness = Some((
                    jt.iter().map(|&i| exps[i].clone()).collect(),
                    kt.iter().map(|&i| exps[i].clone()).collect(),
                    v,
                ));
                break 'outer;
            }
        }
    }
    let all_vanish = witness.is_none();
    Ok(LemmaReport {
        r,
        degree_bound,
        exact_rank: rank,
        conditions_checked: checked,
        all_vanish,
        witness,
        expansion_cost: cost,
        biconditional: (rank <= r) == all_vanish,
    })
}

/// `V(Z) = Π_{j<k} (z_j − z_k)`.
pub fn vandermonde_value(z: &[C64]) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            acc *= z[j] - z[k];
        }
    }
    acc
}

pub fn vandermonde_value_exact(z: &[ExactComplex]) -> ExactComplex {
    let mut acc = ExactComplex::one();
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            acc *= &(&z[j] - &z[k]);
        }
    }
    acc
}

/// A polynomial in `dim` complex variables with exact coefficients.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ExactPoly {
    pub dim: usize,
    pub terms: BTreeMap<MultiIndex, ExactComplex>,
}

impl ExactPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(a: MultiIndex, c: ExactComplex) -> Self {
        let mut p = Self::zero(a.dim());
        p.add_term(a, c);
        p
    }

    pub fn constant(dim: usize, c: ExactComplex) -> Self {
        Self::monomial(MultiIndex::zeros(dim), c)
    }

    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), ExactComplex::one())
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (MultiIndex, ExactComplex)>,
    ) -> Self {
        let mut p = Self::zero(dim);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    fn add_term(&mut self, a: MultiIndex, c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(a.clone())
            .or_insert_with(ExactComplex::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim.max(other.dim));
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                out.add_term(a.add(b), c * d);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_σ P(z_{σ(1)}, …, z_{σ(N)})`.
    pub fn symmetrize(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (sigma, _) in permutations(self.dim) {
            for (a, c) in &self.terms {
                let a = a.padded(self.dim).unwrap_or_else(|| a.clone());
                let permuted = MultiIndex::new(sigma.iter().map(|&s| a.get(s)).collect());
                out.add_term(permuted, c.clone());
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim;
        (0..n.saturating_sub(1)).all(|i| {
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.swap(i, i + 1);
            self.permuted(&sigma) == *self
        })
    }

    fn permuted(&self, sigma: &[usize]) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().map(|(a, c)| {
                let a = a.padded(self.dim).unwrap_or_else(|| a.clone());
                (
                    MultiIndex::new(sigma.iter().map(|&s| a.get(s)).collect()),
                    c.clone(),
                )
            }),
        )
    }

    /// `V(Z) = Π_{j<k} (z_j − z_k)` in `n` variables.
    pub fn vandermonde(n: usize) -> Self {
        let mut p = Self::constant(n, ExactComplex::one());
        for j in 0..n {
            for k in j + 1..n {
                p = p.mul(&Self::var(n, j).sub(&Self::var(n, k)));
            }
        }
        p
    }

    /// `(op(D) P)` where `op(D) = Σ v_α ∂^α`.
    pub fn apply_operator(&self, op: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, v) in &op.terms {
            for (a, c) in &self.terms {
                if let Some((rest, f)) = differentiate(a, alpha) {
                    out.add_term(rest, &(v * c) * &ExactComplex::real(f));
                }
            }
        }
        out
    }

    pub fn constant_term(&self) -> ExactComplex {
        self.terms
            .iter()
            .find(|(a, _)| a.is_zero())
            .map_or_else(ExactComplex::zero, |(_, c)| c.clone())
    }
}

/// `∂^α z^a = (a!/(a−α)!) z^{a−α}`, or `None` when it vanishes.
fn differentiate(a: &MultiIndex, alpha: &MultiIndex) -> Option<(MultiIndex, BigRational)> {
    let d = a.dim().max(alpha.dim());
    let a = a.padded(d).unwrap_or_else(|| a.clone());
    let alpha = alpha.padded(d).unwrap_or_else(|| alpha.clone());
    let rest = a.checked_sub(&alpha)?;
    let mut f = BigInt::one();
    for i in 0..d {
        for t in 0..alpha.get(i) {
            f *= BigInt::from(a.get(i) - t);
        }
    }
    Some((rest, BigRational::from_integer(f)))
}

/// A polynomial in `(z, z̄)` with exact coefficients; keys are `(holomorphic, antiholomorphic)` exponents.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MixedPoly {
    pub dim: usize,
    pub terms: BTreeMap<(MultiIndex, MultiIndex), ExactComplex>,
}

impl MixedPoly {
    /// `P · conj(Q)`.
    pub fn product_with_conj(p: &ExactPoly, q: &ExactPoly) -> Self {
        let mut out = Self {
            dim: p.dim.max(q.dim),
            terms: BTreeMap::new(),
        };
        for (a, c) in &p.terms {
            for (b, d) in &q.terms {
                out.add_term((a.clone(), b.clone()), c * &d.conj());
            }
        }
        out
    }

    fn add_term(&mut self, key: (MultiIndex, MultiIndex), c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(key.clone())
            .or_insert_with(ExactComplex::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ v_α ∂_z^α` applied termwise.
    pub fn apply_holomorphic(&self, op: &ExactPoly) -> Self {
        self.apply(op, false)
    }

    /// `Σ v_β ∂_z̄^β` applied termwise.
    pub fn apply_antiholomorphic(&self, op: &ExactPoly) -> Self {
        self.apply(op, true)
    }

    fn apply(&self, op: &ExactPoly, anti: bool) -> Self {
        let mut out = Self {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (alpha, v) in &op.terms {
            for ((a, b), c) in &self.terms {
                let target = if anti { b } else { a };
                if let Some((rest, f)) = differentiate(target, alpha) {
                    let key = if anti {
                        (a.clone(), rest)
                    } else {
                        (rest, b.clone())
                    };
                    out.add_term(key, &(v * c) * &ExactComplex::real(f));
                }
            }
        }
        out
    }

    pub fn value_at_zero(&self) -> ExactComplex {
        self.terms
            .iter()
            .find(|((a, b), _)| a.is_zero() && b.is_zero())
            .map_or_else(ExactComplex::zero, |(_, c)| c.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DerivativeBudget {
    /// Cap on `terms(V)·terms(P1)·terms(Q1)`.
    pub max_terms: u128,
    pub max_vars: usize,
}

impl Default for DerivativeBudget {
    fn default() -> Self {
        Self {
            max_terms: 50_000_000,
            max_vars: 6,
        }
    }
}

/// `(V(D) V(D̄))(P1 · conj(Q1))` at the origin, by symbolic differentiation.
pub fn symmetric_derivative_test(
    p1: &ExactPoly,
    q1: &ExactPoly,
    n: usize,
    budget: &DerivativeBudget,
) -> Result<ExactComplex> {
    for p in [p1, q1] {
        if p.terms.keys().any(|a| a.dim() > n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim,
            });
        }
    }
    if n > budget.max_vars {
        return Err(Error::BudgetExceeded {
            cost: n as u128,
            cap: budget.max_vars as u128,
        });
    }
    let v = ExactPoly::vandermonde(n);
    let cost = (v.len() as u128) * (p1.len() as u128) * (q1.len() as u128);
    if cost > budget.max_terms {
        return Err(Error::BudgetExceeded {
            cost,
            cap: budget.max_terms,
        });
    }
    let pad = |p: &ExactPoly| {
        ExactPoly::from_terms(
            n,
            p.terms
                .iter()
                .map(|(a, c)| (a.padded(n).unwrap_or_else(|| a.clone()), c.clone())),
        )
    };
    let h = MixedPoly::product_with_conj(&pad(p1), &pad(q1));
    Ok(h.apply_holomorphic(&v)
        .apply_antiholomorphic(&v)
        .value_at_zero())
}

/// `(V(D) V)(0)` in `n` variables.
pub fn vandermonde_self_pairing(n: usize) -> ExactComplex {
    let v = ExactPoly::vandermonde(n);
    v.apply_operator(&v).constant_term()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoveryOptions {
    /// Relative singular-value tolerance for the rank decision.
    pub rel_tol: f64,
    /// Largest accepted condition number of the shifted Hankel block.
    pub max_condition: f64,
    /// Recovered points closer than this are merged.
    pub merge_tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_condition: 1e12,
            merge_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub points: Vec<C64>,
    pub coefficients: Vec<C64>,
    /// Max moment mismatch over `m_0..m_{n−1}`.
    pub residual: f64,
    pub rank: usize,
    pub condition: f64,
    pub warnings: Vec<String>,
}

impl fmt::Display for RecoveryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank={}", self.rank)?;
        writeln!(f, "condition={:e}", self.condition)?;
        writeln!(f, "residual={:e}", self.residual)?;
        for (z, c) in self.points.iter().zip(&self.coefficients) {
            writeln!(f, "point={} {} coeff={} {}", z.re, z.im, c.re, c.im)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning={w}")?;
        }
        Ok(())
    }
}

/// Moment `m_k = ⟨μ, z^k⟩` read off column 0.
fn column_moments(m: &ToeplitzMatrix) -> Result<Vec<C64>> {
    let disk = match &m.bases {
        None | Some((BasisSpec::DiskMonomial, BasisSpec::DiskMonomial)) => true,
        Some((BasisSpec::Monomial { dim: 1 }, BasisSpec::Monomial { dim: 1 })) => false,
        Some((a, b)) => {
            return Err(Error::InvalidArgument(format!(
                "recovery needs planar monomial bases, got {a:?} and {b:?}"
            )))
        }
    };
    let f = m.to_float();
    // e_k = √(k+1) z^k, e_0 = 1
    Ok((0..f.nrows())
        .map(|k| {
            if disk {
                f[(k, 0)] / ((k + 1) as f64).sqrt()
            } else {
                f[(k, 0)]
            }
        })
        .collect())
}

/// Prony recovery of `Σ c_q δ_{z_q}` from a planar moment matrix.
pub fn recover_point_masses(
    m: &ToeplitzMatrix,
    r_max: usize,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    let n = m.nrows();
    if n < 2 * r_max + 1 || m.ncols() == 0 {
        return Err(Error::InvalidArgument(format!(
            "truncation {n} is below 2·r_max + 1 = {}",
            2 * r_max + 1
        )));
    }
    let rank = match &m.entries {
        Entries::Exact(e) => exact_rank(e),
        Entries::Float(f) => numerical_rank(f, opts.rel_tol)?,
    };
    if rank > r_max {
        return Err(Error::RankExceeds { rank, max: r_max });
    }
    let moments = column_moments(m)?;
    let mut warnings = Vec::new();
    if rank == 0 {
        let residual = moments.iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(RecoveryResult {
            points: Vec::new(),
            coefficients: Vec::new(),
            residual,
            rank,
            condition: 1.0,
            warnings,
        });
    }

    let p = n.div_ceil(2);
    let q = n + 1 - p;
    let hankel = CMatrix::from_fn(p, q, |i, j| moments[i + j]);
    let (u, _, _) = thin_svd(&hankel)?;
    // singular values are sorted descending
    let ur = u.columns(0, rank).into_owned();
    let u1 = ur.rows(0, p - 1).into_owned();
    let u2 = ur.rows(1, p - 1).into_owned();
    let condition = condition_number(&u1)?;
    if !(condition <= opts.max_condition) {
        return Err(Error::IllConditioned { condition });
    }
    let pencil = pseudo_inverse(&u1, 1e-15)? * u2;
    let nodes = eigenvalues(&pencil)?;

    let mut points: Vec<C64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for z in nodes {
        match points.iter().position(|p| (p - z).norm() < opts.merge_tol) {
            Some(i) => {
                warnings.push(format!("merged recovered points {} and {z}", points[i]));
                points[i] = (points[i] * counts[i] as f64 + z) / (counts[i] + 1) as f64;
                counts[i] += 1;
            }
            None => {
                points.push(z);
                counts.push(1);
            }
        }
    }
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let vander = DMatrix::from_fn(n, points.len(), |k, j| points[j].powu(k as u32));
    let coefficients = least_squares(&vander, &moments)?;
    let residual = (0..n)
        .map(|k| {
            let synth: C64 = (0..points.len())
                .map(|j| coefficients[j] * vander[(k, j)])
                .sum();
            (synth - moments[k]).norm()
        })
        .fold(0.0, f64::max);
    Ok(RecoveryResult {
        points,
        coefficients,
        residual,
        rank,
        condition,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, point_masses};
    use crate::bases::BasisFamily;

    fn q(n: i64, d: i64) -> ExactComplex {
        ExactComplex::from_ratio(n, d)
    }

    fn s(k: u32) -> MultiIndex {
        MultiIndex::scalar(k)
    }

    #[test]
    fn single_atom_vanishes() {
        let phi = FiniteFunctional::planar(&[(q(1, 1), q(1, 1))]);
        let b = ExpansionBudget::default();
        for (j, k) in [([0, 1], [0, 1]), ([2, 3], [1, 4]), ([1, 1], [0, 2])] {
            let v =
                vandermonde_vanishing(&phi, &[s(j[0]), s(j[1])], &[s(k[0]), s(k[1])], &b).unwrap();
            assert!(v.is_zero());
        }
    }

    #[test]
    fn two_real_atoms_hand_value() {
        let phi = FiniteFunctional::planar(&[(q(1, 1), q(1, 1)), (q(2, 1), q(1, 1))]);
        let v = vandermonde_vanishing(
            &phi,
            &[s(0), s(1)],
            &[s(0), s(1)],
            &ExpansionBudget::default(),
        )
        .unwrap();
        assert_eq!(v, q(1, 1));
    }

    #[test]
    fn two_atoms_size_three_vanishes() {
        let phi = FiniteFunctional::planar(&[
            (q(1, 2), q(3, 1)),
            (ExactComplex::from_gaussian(0, 1), q(-1, 2)),
        ]);
        let b = ExpansionBudget::default();
        let v = vandermonde_vanishing(&phi, &[s(0), s(2), s(5)], &[s(1), s(3), s(4)], &b).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn budget_is_enforced() {
        let phi = FiniteFunctional::planar(&vec![(q(1, 1), q(1, 1)); 5]);
        let j: Vec<_> = (0..5).map(s).collect();
        let err = vandermonde_vanishing(&phi, &j, &j, &ExpansionBudget::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { cost: 375000, .. }));
    }

    #[test]
    fn three_generic_atoms() {
        let phi = FiniteFunctional::planar(&[
            (q(1, 2), q(1, 1)),
            (
                q(-1, 3) + ExactComplex::from_gaussian(0, 1) * q(1, 4),
                q(2, 1),
            ),
            (ExactComplex::from_gaussian(0, 1) * q(1, 2), q(-1, 1)),
        ]);
        let b = ExpansionBudget::default();
        let r2 = check_lemma_equivalence(&phi, 2, 5, &b).unwrap();
        assert_eq!(r2.exact_rank, 3);
        assert!(!r2.all_vanish);
        assert!(r2.biconditional);
        let r3 = check_lemma_equivalence(&phi, 3, 5, &b).unwrap();
        assert!(r3.all_vanish);
        assert!(r3.biconditional);
    }

    #[test]
    fn zero_coefficient_acts_as_one_atom() {
        let phi = FiniteFunctional::planar(&[(q(1, 3), q(1, 1)), (q(-1, 2), q(0, 1))]);
        let r = check_lemma_equivalence(&phi, 1, 4, &ExpansionBudget::default()).unwrap();
        assert_eq!(r.exact_rank, 1);
        assert!(r.all_vanish && r.biconditional);
    }

    #[test]
    fn vandermonde_sign_and_antisymmetry() {
        let z = |x: f64, y: f64| C64::new(x, y);
        assert_eq!(vandermonde_value(&[z(0.0, 0.0), z(1.0, 0.0)]), z(-1.0, 0.0));
        let a = [z(0.3, 0.1), z(-0.2, 0.5), z(0.7, -0.4)];
        let b = [a[1], a[0], a[2]];
        assert!((vandermonde_value(&a) + vandermonde_value(&b)).norm() < 1e-15);
        assert_eq!(vandermonde_value(&[a[0], a[0], a[2]]), z(0.0, 0.0));
    }

    #[test]
    fn vandermonde_pairs_with_itself() {
        let v = ExactPoly::vandermonde(2);
        let b = DerivativeBudget::default();
        assert_eq!(symmetric_derivative_test(&v, &v, 2, &b).unwrap(), q(4, 1));
        assert_eq!(vandermonde_self_pairing(2), q(2, 1));
        // Σ over the six permutations of (2,1,0), each with weight 2!·1!
        assert_eq!(vandermonde_self_pairing(3), q(12, 1));
    }

    #[test]
    fn symmetric_argument_vanishes() {
        let p = ExactPoly::from_terms(
            3,
            [
                (MultiIndex::new(vec![2, 1, 0]), q(1, 1)),
                (MultiIndex::new(vec![0, 0, 3]), q(2, 3)),
            ],
        );
        let sym = p.symmetrize();
        assert!(sym.is_symmetric());
        let b = DerivativeBudget::default();
        assert!(
            symmetric_derivative_test(&sym, &ExactPoly::vandermonde(3), 3, &b)
                .unwrap()
                .is_zero()
        );
        assert!(
            symmetric_derivative_test(&ExactPoly::vandermonde(3), &sym, 3, &b)
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn recovers_single_point() {
        let f = point_masses(&[(C64::new(0.4, 0.0), C64::new(1.0, 0.0))]);
        let m = assemble(&f, &BasisFamily::disk(8), &BasisFamily::disk(8)).unwrap();
        let r = recover_point_masses(&m, 2, &RecoveryOptions::default()).unwrap();
        assert_eq!(r.points.len(), 1);
        assert!((r.points[0] - C64::new(0.4, 0.0)).norm() < 1e-12);
        assert!((r.coefficients[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn recovers_signed_pair() {
        let f = point_masses(&[
            (C64::new(0.5, 0.0), C64::new(2.0, 0.0)),
            (C64::new(0.0, 0.3), C64::new(-1.0, 0.0)),
        ]);
        let m = assemble(&f, &BasisFamily::disk(10), &BasisFamily::disk(10)).unwrap();
        let r = recover_point_masses(&m, 3, &RecoveryOptions::default()).unwrap();
        assert_eq!(r.points.len(), 2);
        // sorted by real part
        assert!((r.points[0] - C64::new(0.0, 0.3)).norm() < 1e-10);
        assert!((r.points[1] - C64::new(0.5, 0.0)).norm() < 1e-10);
        assert!((r.coefficients[0] + 1.0).norm() < 1e-10);
        assert!((r.coefficients[1] - 2.0).norm() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn recovery_rejects_excess_rank() {
        let pts: Vec<_> = (0..4)
            .map(|k| (C64::from_polar(0.5, k as f64), C64::new(1.0, 0.0)))
            .collect();
        let m = assemble(
            &point_masses(&pts),
            &BasisFamily::disk(9),
            &BasisFamily::disk(9),
        )
        .unwrap();
        assert!(matches!(
            recover_point_masses(&m, 3, &RecoveryOptions::default()),
            Err(Error::RankExceeds { rank: 4, max: 3 })
        ));
    }
}
