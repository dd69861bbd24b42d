//! Experiment configuration, one TOML file per experiment.
//!
//! Library types (`WeightSpec`, `BasisSpec`, `IndexSet`, …) are read with their own
//! serde layouts, so a config can describe anything the library can build.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toeplitz_core::assembly::Mode;
use toeplitz_core::bases::BasisSpec;
use toeplitz_core::physics::landau::CreationConvention;
use toeplitz_core::physics::sphere::SamplingKind;
use toeplitz_core::sparse::IndexSet;
use toeplitz_core::weights::WeightSpec;
use toeplitz_core::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Assemble,
    Rank,
    Recover,
    Vandermonde,
    Sparse,
    Landau,
    Helmholtz,
    Born,
    Suite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Assemble => "assemble",
            Kind::Rank => "rank",
            Kind::Recover => "recover",
            Kind::Vandermonde => "vandermonde",
            Kind::Sparse => "sparse",
            Kind::Landau => "landau",
            Kind::Helmholtz => "helmholtz",
            Kind::Born => "born",
            Kind::Suite => "suite",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional in the file; the subcommand fills it in and must agree with it.
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    /// Random point masses drawn from `seed`, used when `weight` is absent.
    #[serde(default)]
    pub random_points: Option<RandomPoints>,
    /// Row basis; also the column basis unless `col_basis` is given.
    #[serde(default)]
    pub basis: Option<BasisSpec>,
    #[serde(default)]
    pub col_basis: Option<BasisSpec>,
    #[serde(default = "default_truncations")]
    pub truncations: Vec<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub mode: Mode,
    /// Output directory, relative to the working directory.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Seed for sampled inputs; the suite falls back to its own default.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub recover: RecoverSection,
    #[serde(default)]
    pub vandermonde: VandermondeSection,
    #[serde(default)]
    pub sparse: Option<SparseSection>,
    #[serde(default)]
    pub landau: LandauSection,
    #[serde(default)]
    pub helmholtz: HelmholtzSection,
    #[serde(default)]
    pub born: BornSection,
    #[serde(default)]
    pub expect: Expect,
}

fn default_truncations() -> Vec<usize> {
    vec![8]
}

fn default_tol() -> f64 {
    1e-10
}

fn default_threads() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPoints {
    pub count: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_separation")]
    pub min_separation: f64,
}

fn default_radius() -> f64 {
    0.8
}

fn default_separation() -> f64 {
    0.15
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverSection {
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    #[serde(default = "default_merge_tol")]
    pub merge_tol: f64,
    #[serde(default = "default_max_condition")]
    pub max_condition: f64,
}

fn default_r_max() -> usize {
    5
}

fn default_merge_tol() -> f64 {
    1e-6
}

fn default_max_condition() -> f64 {
    1e12
}

impl Default for RecoverSection {
    fn default() -> Self {
        Self {
            r_max: default_r_max(),
            merge_tol: default_merge_tol(),
            max_condition: default_max_condition(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VandermondeSection {
    /// Ranks `r` to test; each runs the size-`r+1` conditions.
    #[serde(default)]
    pub r: Vec<usize>,
    /// Exponent bound `D`; defaults to `r + 1` per rank.
    #[serde(default)]
    pub degree_bound: Option<u32>,
    /// One explicit condition `(J, K)`, evaluated on its own.
    #[serde(default)]
    pub j: Vec<MultiIndex>,
    #[serde(default)]
    pub k: Vec<MultiIndex>,
    #[serde(default)]
    pub max_terms: Option<u64>,
    #[serde(default)]
    pub max_conditions: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseSection {
    pub set: IndexSet,
    pub direction: Vec<u32>,
    /// `N` of the sparseness test.
    #[serde(default = "default_sparse_n")]
    pub n: u32,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    /// Base points of the sampled lines; all `|α| ≤ 5` when empty.
    #[serde(default)]
    pub alphas: Vec<MultiIndex>,
    /// `Z`-set shifts; both lists empty skips the `Z`-set.
    #[serde(default)]
    pub zset_alphas: Vec<MultiIndex>,
    #[serde(default)]
    pub zset_betas: Vec<MultiIndex>,
    /// Compare the rank of the reduced matrix of `weight` with the full one.
    #[serde(default)]
    pub reduce: bool,
}

fn default_sparse_n() -> u32 {
    1
}

fn default_horizon() -> u64 {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauSection {
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
    #[serde(default)]
    pub convention: CreationConvention,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_b() -> f64 {
    2.0
}

fn default_levels() -> Vec<u32> {
    vec![0]
}

fn default_grid_points() -> usize {
    128
}

impl Default for LandauSection {
    fn default() -> Self {
        Self {
            b: default_b(),
            levels: default_levels(),
            convention: CreationConvention::default(),
            grid_points: default_grid_points(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelmholtzSection {
    /// Harmonic degrees `L`; the matrix size is `2L + 1`.
    #[serde(default = "default_degrees")]
    pub degrees: Vec<u32>,
    #[serde(default = "default_chord_nodes")]
    pub chord_nodes: usize,
    #[serde(default = "default_radial_nodes")]
    pub radial_nodes: usize,
}

fn default_degrees() -> Vec<u32> {
    vec![4]
}

fn default_chord_nodes() -> usize {
    40
}

fn default_radial_nodes() -> usize {
    48
}

impl Default for HelmholtzSection {
    fn default() -> Self {
        Self {
            degrees: default_degrees(),
            chord_nodes: default_chord_nodes(),
            radial_nodes: default_radial_nodes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BornSection {
    #[serde(default = "default_samplings")]
    pub samplings: Vec<SamplingKind>,
}

fn default_samplings() -> Vec<SamplingKind> {
    [6, 12, 18, 24]
        .into_iter()
        .map(|n| SamplingKind::Fibonacci { n })
        .collect()
}

impl Default for BornSection {
    fn default() -> Self {
        Self {
            samplings: default_samplings(),
        }
    }
}

/// Declared properties; any violated one turns the exit status to 2.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    /// Exact rank at every truncation.
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub min_rank: Option<usize>,
    #[serde(default)]
    pub max_rank: Option<usize>,
    /// Ceiling on the experiment's deviation figure (residual, two-path gap, …).
    #[serde(default)]
    pub max_deviation: Option<f64>,
    /// Expected `N`-sparseness verdict.
    #[serde(default)]
    pub sparse: Option<bool>,
}

/// A config that could not be read or makes no sense.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Dotted path of the `key = value` line holding byte `offset`, prefixed by its table header.
fn key_at(text: &str, offset: usize) -> Option<String> {
    let start = text[..offset.min(text.len())]
        .rfind('\n')
        .map_or(0, |i| i + 1);
    let line = text[start..].lines().next()?;
    let (key, _) = line.split_once('=')?;
    let key = key.trim();
    let bare = |c: char| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.');
    if key.is_empty() || !key.chars().all(bare) {
        return None;
    }
    let table = text[..start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && !l.starts_with("[["))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    Some(match table {
        Some(t) => format!("{t}.{key}"),
        None => key.to_string(),
    })
}

impl ExperimentConfig {
    /// Everything at its default, for runs without a file.
    pub fn empty(kind: Kind) -> Self {
        let mut c: Self = toml::from_str("").expect("defaults deserialize");
        c.kind = Some(kind);
        c
    }

    /// Parses a config; TOML errors carry the line, column and offending key.
    pub fn parse(text: &str, origin: &str) -> Result<Self, UsageError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let key = e.span().and_then(|s| key_at(text, s.start));
            match key {
                Some(k) => UsageError(format!("{origin}: key `{k}`: {e}")),
                None => UsageError(format!("{origin}: {e}")),
            }
        })?;
        cfg.validate()
            .map_err(|e| UsageError(format!("{origin}: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let bad = |key: &str, why: String| Err(UsageError(format!("key `{key}`: {why}")));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("tol", format!("{} is not in (0, 1)", self.tol));
        }
        if self.threads == 0 {
            return bad("threads", "must be at least 1".into());
        }
        if self.truncations.is_empty() || self.truncations.contains(&0) {
            return bad(
                "truncations",
                "need a nonempty list of positive sizes".into(),
            );
        }
        if let Some(w) = &self.weight {
            if let Err(e) = w.validate() {
                return bad("weight", e.to_string());
            }
        }
        if self.weight.is_some() && self.random_points.is_some() {
            return bad("random_points", "conflicts with `weight`".into());
        }
        if let Some(r) = &self.random_points {
            if r.count == 0 || !(r.radius > 0.0 && r.radius < 1.0) {
                return bad(
                    "random_points",
                    "need count ≥ 1 and radius in (0, 1)".into(),
                );
            }
        }
        if self.vandermonde.j.len() != self.vandermonde.k.len() {
            return bad(
                "vandermonde.k",
                "must have the length of `vandermonde.j`".into(),
            );
        }
        if let Some(s) = &self.sparse {
            if s.zset_alphas.len() != s.zset_betas.len() {
                return bad(
                    "sparse.zset_betas",
                    "must have the length of `sparse.zset_alphas`".into(),
                );
            }
            if s.horizon == 0 {
                return bad("sparse.horizon", "must be at least 1".into());
            }
        }
        if !(self.landau.b > 0.0) {
            return bad("landau.b", format!("{} is not positive", self.landau.b));
        }
        if !(self.recover.merge_tol > 0.0) {
            return bad("recover.merge_tol", "must be positive".into());
        }
        Ok(())
    }
}
