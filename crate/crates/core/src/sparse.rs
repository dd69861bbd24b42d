//! Index sets in `Z₊^d`, directional densities and the Z-set construction.
//!
//! Densities are finite-horizon proxies: the count of `t ∈ [0, horizon)` with
//! `α + tγ ∈ J`, divided by `horizon`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::MultiIndex;

/// A nonzero direction `γ ∈ Z₊^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultiIndex", into = "MultiIndex")]
pub struct Direction(MultiIndex);

impl TryFrom<MultiIndex> for Direction {
    type Error = Error;

    fn try_from(m: MultiIndex) -> Result<Self> {
        Direction::new(m)
    }
}

impl From<Direction> for MultiIndex {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    pub fn new(gamma: MultiIndex) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::InvalidArgument("direction must be nonzero".into()));
        }
        Ok(Self(gamma))
    }

    pub fn from_slice(gamma: &[u32]) -> Result<Self> {
        Self::new(MultiIndex::new(gamma.to_vec()))
    }

    pub fn gamma(&self) -> &MultiIndex {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Membership-decidable subset of `Z₊^d`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IndexSet {
    Empty,
    All,
    /// `Σ_j w_j α_j ≡ residue (mod modulus)`; weights default to 1.
    Modulus {
        modulus: u64,
        #[serde(default)]
        residue: u64,
        #[serde(default)]
        weights: Vec<u64>,
    },
    /// `Σ_j w_j α_j` is a perfect `exponent`-th power.
    Powers {
        exponent: u32,
        #[serde(default)]
        weights: Vec<u64>,
    },
    Explicit {
        members: Vec<MultiIndex>,
    },
    Complement {
        set: Box<IndexSet>,
    },
    Union {
        sets: Vec<IndexSet>,
    },
    Intersection {
        sets: Vec<IndexSet>,
    },
    /// `set + by`.
    Shift {
        set: Box<IndexSet>,
        by: MultiIndex,
    },
    #[serde(skip)]
    Predicate(Arc<dyn Fn(&MultiIndex) -> bool + Send + Sync>),
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "Empty"),
            Self::All => write!(f, "All"),
            Self::Modulus {
                modulus,
                residue,
                weights,
            } => f
                .debug_struct("Modulus")
                .field("modulus", modulus)
                .field("residue", residue)
                .field("weights", weights)
                .finish(),
            Self::Powers { exponent, weights } => f
                .debug_struct("Powers")
                .field("exponent", exponent)
                .field("weights", weights)
                .finish(),
            Self::Explicit { members } => f
                .debug_struct("Explicit")
                .field("members", members)
                .finish(),
            Self::Complement { set } => f.debug_tuple("Complement").field(set).finish(),
            Self::Union { sets } => f.debug_tuple("Union").field(sets).finish(),
            Self::Intersection { sets } => f.debug_tuple("Intersection").field(sets).finish(),
            Self::Shift { set, by } => f
                .debug_struct("Shift")
                .field("set", set)
                .field("by", by)
                .finish(),
            Self::Predicate(_) => write!(f, "Predicate(..)"),
        }
    }
}

fn weighted_sum(alpha: &[u64], weights: &[u64]) -> u64 {
    alpha
        .iter()
        .enumerate()
        .map(|(j, &a)| a * weights.get(j).copied().unwrap_or(1))
        .sum()
}

fn is_perfect_power(v: u64, k: u32) -> bool {
    if k <= 1 || v <= 1 {
        return true;
    }
    let mut r = (v as f64).powf(1.0 / f64::from(k)).round() as u64;
    // correct the rounding of the float root
    while r > 0 && r.checked_pow(k).is_none_or(|p| p > v) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|p| p <= v) {
        r += 1;
    }
    r.pow(k) == v
}

impl IndexSet {
    pub fn multiples(modulus: u64) -> Self {
        Self::Modulus {
            modulus,
            residue: 0,
            weights: vec![],
        }
    }

    pub fn squares() -> Self {
        Self::Powers {
            exponent: 2,
            weights: vec![],
        }
    }

    pub fn explicit(members: Vec<MultiIndex>) -> Self {
        Self::Explicit { members }
    }

    pub fn complement(self) -> Self {
        Self::Complement {
            set: Box::new(self),
        }
    }

    pub fn predicate(f: impl Fn(&MultiIndex) -> bool + Send + Sync + 'static) -> Self {
        Self::Predicate(Arc::new(f))
    }

    pub fn shifted(self, by: MultiIndex) -> Self {
        Self::Shift {
            set: Box::new(self),
            by,
        }
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        let a: Vec<u64> = alpha.components().iter().map(|&v| u64::from(v)).collect();
        self.contains_raw(&a)
    }

    /// Membership for a point given with wide components.
    pub fn contains_raw(&self, alpha: &[u64]) -> bool {
        match self {
            Self::Empty => false,
            Self::All => true,
            Self::Modulus {
                modulus,
                residue,
                weights,
            } => *modulus > 0 && weighted_sum(alpha, weights) % modulus == residue % modulus,
            Self::Powers { exponent, weights } => {
                is_perfect_power(weighted_sum(alpha, weights), *exponent)
            }
            Self::Explicit { members } => members.iter().any(|m| {
                let n = m.dim().max(alpha.len());
                (0..n).all(|j| u64::from(m.get(j)) == alpha.get(j).copied().unwrap_or(0))
            }),
            Self::Complement { set } => !set.contains_raw(alpha),
            Self::Union { sets } => sets.iter().any(|s| s.contains_raw(alpha)),
            Self::Intersection { sets } => sets.iter().all(|s| s.contains_raw(alpha)),
            Self::Shift { set, by } => {
                let mut b = Vec::with_capacity(alpha.len());
                for (j, &v) in alpha.iter().enumerate() {
                    match v.checked_sub(u64::from(by.get(j))) {
                        Some(x) => b.push(x),
                        None => return false,
                    }
                }
                if (alpha.len()..by.dim()).any(|j| by.get(j) > 0) {
                    return false;
                }
                set.contains_raw(&b)
            }
            Self::Predicate(f) => {
                let comps: Option<Vec<u32>> =
                    alpha.iter().map(|&v| u32::try_from(v).ok()).collect();
                comps.is_some_and(|c| f(&MultiIndex::new(c)))
            }
        }
    }
}

/// `n(γ) = {j : γ_j = 0}`, coordinates numbered from 1.
pub fn direction_support(gamma: &Direction) -> BTreeSet<usize> {
    gamma
        .gamma()
        .components()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g == 0)
        .map(|(j, _)| j + 1)
        .collect()
}

/// Whether `∪_l n(γ_l) = {1, …, d}`.
pub fn covers_all_coordinates(dirs: &[Direction], d: usize) -> bool {
    let union: BTreeSet<usize> = dirs.iter().flat_map(direction_support).collect();
    (1..=d).all(|j| union.contains(&j))
}

fn ray_point(alpha: &MultiIndex, gamma: &Direction, t: u64) -> Vec<u64> {
    let n = alpha.dim().max(gamma.dim());
    (0..n)
        .map(|j| u64::from(alpha.get(j)) + t * u64::from(gamma.gamma().get(j)))
        .collect()
}

/// `#{t ∈ [0, horizon) : α + tγ ∈ J} / horizon`.
pub fn line_density(
    j: &IndexSet,
    gamma: &Direction,
    alpha: &MultiIndex,
    horizon: u64,
) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let count = (0..horizon)
        .filter(|&t| j.contains_raw(&ray_point(alpha, gamma, t)))
        .count();
    Ok(count as f64 / horizon as f64)
}

/// Densities at horizons `h/2^k, …, h/2, h` (each at least 1), coarsest first.
pub fn line_density_profile(
    j: &IndexSet,
    gamma: &Direction,
    alpha: &MultiIndex,
    horizon: u64,
    levels: u32,
) -> Result<Vec<(u64, f64)>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let mut hs: Vec<u64> = (0..=levels).map(|k| (horizon >> k).max(1)).collect();
    hs.sort_unstable();
    hs.dedup();
    let mut out = Vec::with_capacity(hs.len());
    let mut count = 0u64;
    let mut t = 0u64;
    for h in hs {
        while t < h {
            if j.contains_raw(&ray_point(alpha, gamma, t)) {
                count += 1;
            }
            t += 1;
        }
        out.push((h, count as f64 / h as f64));
    }
    Ok(out)
}

/// Finite-horizon verdict on `N`-sparseness along one direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVerdict {
    pub sparse: bool,
    pub n: u32,
    pub max_density: f64,
    /// Base point attaining `max_density`.
    pub worst_base: MultiIndex,
    /// `1/N − max_density`.
    pub margin: f64,
    pub margin_guard: f64,
    pub horizon: u64,
    /// Always set: the verdict certifies only the sampled lines up to the horizon.
    pub approximate: bool,
}

/// Default base points: all `α` with `|α| ≤ 5`.
pub fn default_base_points(dim: usize) -> Vec<MultiIndex> {
    MultiIndex::graded_lex(dim, 5)
}

/// `max_α line_density < 1/N − 2/horizon` over the sampled base points.
pub fn is_n_sparse(
    j: &IndexSet,
    gamma: &Direction,
    n: u32,
    alphas: Option<&[MultiIndex]>,
    horizon: u64,
) -> Result<SparseVerdict> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let defaults;
    let alphas = match alphas {
        Some(a) if !a.is_empty() => a,
        Some(_) => return Err(Error::InvalidArgument("empty base point sample".into())),
        None => {
            defaults = default_base_points(gamma.dim());
            &defaults[..]
        }
    };
    let mut max_density = -1.0;
    let mut worst = alphas[0].clone();
    for a in alphas {
        let d = line_density(j, gamma, a, horizon)?;
        if d > max_density {
            max_density = d;
            worst = a.clone();
        }
    }
    let guard = 2.0 / horizon as f64;
    let inv = 1.0 / f64::from(n);
    Ok(SparseVerdict {
        sparse: max_density < inv - guard,
        n,
        max_density,
        worst_base: worst,
        margin: inv - max_density,
        margin_guard: guard,
        horizon,
        approximate: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZSet {
    pub members: Vec<u64>,
    pub density: f64,
    /// `Σ_{t ∈ Z} (t+1)⁻¹`, a divergence proxy only.
    pub harmonic_sum: f64,
    pub horizon: u64,
}

/// `t ∈ [0, horizon)` with `α_j + tγ ∉ J` and `β_j + tγ ∉ J` for all `j`.
pub fn zset(
    j: &IndexSet,
    alphas: &[MultiIndex],
    betas: &[MultiIndex],
    gamma: &Direction,
    horizon: u64,
) -> Result<ZSet> {
    if alphas.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            expected: alphas.len(),
            found: betas.len(),
        });
    }
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let members: Vec<u64> = (0..horizon)
        .filter(|&t| {
            alphas
                .iter()
                .chain(betas)
                .all(|a| !j.contains_raw(&ray_point(a, gamma, t)))
        })
        .collect();
    Ok(ZSet {
        density: members.len() as f64 / horizon as f64,
        harmonic_sum: members.iter().map(|&t| 1.0 / (t as f64 + 1.0)).sum(),
        members,
        horizon,
    })
}
