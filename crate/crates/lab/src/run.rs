//! Executes one experiment: CSV artifacts plus a `key=value` text report.
//!
//! Entries are filled in row order and every sum runs in a fixed order, so a
//! single-threaded rerun of a config reproduces its files byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use toeplitz_core::assembly::{
    assemble_with, reduced_matrix, AssemblyOptions, Entries, Mode, ToeplitzMatrix,
};
use toeplitz_core::bases::{BasisFamily, BasisSpec};
use toeplitz_core::io::{entries_csv, float_matrix_csv, vector_csv};
use toeplitz_core::numeric::{exact_rank, numerical_rank, singular_values, C64};
use toeplitz_core::physics::born::born_matrix;
use toeplitz_core::physics::helmholtz::{harmonic_count, helmholtz_two_path, TransformQuadrature};
use toeplitz_core::physics::landau::{
    cross_gram_max, landau_basis, landau_level, landau_toeplitz, LandauConfig,
};
use toeplitz_core::physics::sphere::SphereSampling;
use toeplitz_core::rank_lab::{
    check_lemma_equivalence, recover_point_masses, vandermonde_vanishing, ExpansionBudget,
    FiniteFunctional, RecoveryOptions,
};
use toeplitz_core::sparse::{
    direction_support, is_n_sparse, line_density_profile, zset, Direction,
};
use toeplitz_core::weights::{Location, PointDistribution, WeightSpec};

use crate::config::{ExperimentConfig, Kind, UsageError};
use crate::sampling::{rng, PointSampler};
use crate::suite::{run_suite, SuiteOptions};

/// Why a run stopped before producing a verdict.
#[derive(Debug)]
pub enum RunError {
    Usage(UsageError),
    Compute(toeplitz_core::Error),
    Io(std::io::Error, PathBuf),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(e) => write!(f, "usage error: {e}"),
            RunError::Compute(e) => write!(f, "error: {e}"),
            RunError::Io(e, p) => write!(f, "error: {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<toeplitz_core::Error> for RunError {
    fn from(e: toeplitz_core::Error) -> Self {
        RunError::Compute(e)
    }
}

impl From<UsageError> for RunError {
    fn from(e: UsageError) -> Self {
        RunError::Usage(e)
    }
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(UsageError(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: String,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
    /// Declared properties that were violated.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// 0 when every declared property held, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    report: String,
    artifacts: Vec<String>,
    failures: Vec<String>,
}

impl Run<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        self.report.push_str(s.as_ref());
        self.report.push('\n');
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| RunError::Io(e, path))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn check(&mut self, what: &str, ok: bool) {
        self.line(format!(
            "check {what}: {}",
            if ok { "pass" } else { "fail" }
        ));
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn check_rank(&mut self, label: &str, rank: usize) {
        let e = self.cfg.expect.clone();
        if let Some(r) = e.rank {
            self.check(&format!("{label} rank == {r}"), rank == r);
        }
        if let Some(r) = e.min_rank {
            self.check(&format!("{label} rank >= {r}"), rank >= r);
        }
        if let Some(r) = e.max_rank {
            self.check(&format!("{label} rank <= {r}"), rank <= r);
        }
    }

    fn check_deviation(&mut self, label: &str, d: f64) {
        if let Some(max) = self.cfg.expect.max_deviation {
            self.check(&format!("{label} deviation {d:e} <= {max:e}"), d <= max);
        }
    }

    fn weight(&self) -> Result<WeightSpec, RunError> {
        if let Some(w) = &self.cfg.weight {
            return Ok(w.clone());
        }
        if let Some(r) = &self.cfg.random_points {
            let sampler = PointSampler {
                radius: r.radius,
                min_separation: r.min_separation,
                ..PointSampler::default()
            };
            let mut g = rng(self.cfg.seed.unwrap_or(0));
            return Ok(WeightSpec::Points(PointDistribution::masses(
                &sampler.sample(&mut g, r.count),
            )));
        }
        Err(usage(format!(
            "key `weight`: required by `{}` experiments (or give `random_points`)",
            self.kind()
        )))
    }

    fn kind(&self) -> Kind {
        self.cfg.kind.unwrap_or(Kind::Suite)
    }

    fn options(&self) -> AssemblyOptions {
        AssemblyOptions {
            mode: self.cfg.mode,
            threads: self.cfg.threads,
        }
    }

    fn bases(&self, n: usize) -> Result<(BasisFamily, BasisFamily), RunError> {
        let default = if self.cfg.mode == Mode::Exact {
            BasisSpec::Monomial { dim: 1 }
        } else {
            BasisSpec::DiskMonomial
        };
        let rows = self.cfg.basis.clone().unwrap_or(default);
        let cols = self.cfg.col_basis.clone().unwrap_or_else(|| rows.clone());
        Ok((BasisFamily::new(rows, n)?, BasisFamily::new(cols, n)?))
    }

    fn matrix(&self, w: &WeightSpec, n: usize) -> Result<ToeplitzMatrix, RunError> {
        let (rows, cols) = self.bases(n)?;
        Ok(assemble_with(w, &rows, &cols, self.options())?)
    }
}

fn weight_summary(w: &WeightSpec) -> String {
    match w {
        WeightSpec::Points(p) => format!("points({} terms)", p.terms.len()),
        WeightSpec::Radial(r) => format!("radial(dim {}, support {})", r.dim, r.support_radius),
        WeightSpec::Polynomial(p) => {
            format!("polynomial({} terms, radius {})", p.terms.len(), p.radius)
        }
        WeightSpec::Grid(g) => format!("grid({:?})", g.shape),
    }
}

/// Rank of the stored entries: exact when exact, numerical at `tol` otherwise.
fn matrix_rank(m: &ToeplitzMatrix, tol: f64) -> Result<usize, RunError> {
    Ok(match &m.entries {
        Entries::Exact(e) => exact_rank(e),
        Entries::Float(f) => numerical_rank(f, tol)?,
    })
}

fn fmt_c(z: C64) -> String {
    format!("{:?},{:?}", z.re, z.im)
}

/// Runs `cfg`, writing artifacts under `dir` (created if missing).
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, RunError> {
    cfg.validate()?;
    fs::create_dir_all(dir).map_err(|e| RunError::Io(e, dir.to_path_buf()))?;
    let mut r = Run {
        cfg,
        dir,
        report: String::new(),
        artifacts: Vec::new(),
        failures: Vec::new(),
    };
    let kind = r.kind();
    r.line(format!("kind={kind}"));
    match kind {
        Kind::Assemble => assemble_experiment(&mut r)?,
        Kind::Rank => rank_experiment(&mut r)?,
        Kind::Recover => recover_experiment(&mut r)?,
        Kind::Vandermonde => vandermonde_experiment(&mut r)?,
        Kind::Sparse => sparse_experiment(&mut r)?,
        Kind::Landau => landau_experiment(&mut r)?,
        Kind::Helmholtz => helmholtz_experiment(&mut r)?,
        Kind::Born => born_experiment(&mut r)?,
        Kind::Suite => suite_experiment(&mut r)?,
    }
    let status = if r.failures.is_empty() {
        "pass"
    } else {
        "fail"
    };
    r.line(format!("status={status}"));
    let report = r.report.clone();
    r.write("report.txt", &report)?;
    Ok(Outcome {
        report: r.report,
        artifacts: r.artifacts,
        failures: r.failures,
    })
}

fn assemble_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    r.line(format!("weight={}", weight_summary(&w)));
    for &n in &r.cfg.truncations.clone() {
        let m = r.matrix(&w, n)?;
        r.line(format!(
            "n={n} shape={}x{} exact={}",
            m.nrows(),
            m.ncols(),
            m.is_exact()
        ));
        r.write(&format!("matrix_n{n}.csv"), &entries_csv(&m.entries))?;
    }
    Ok(())
}

fn rank_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    r.line(format!("weight={}", weight_summary(&w)));
    let tol = r.cfg.tol;
    for &n in &r.cfg.truncations.clone() {
        let m = r.matrix(&w, n)?;
        let rank = matrix_rank(&m, tol)?;
        let float = m.to_float();
        let sigma = singular_values(&float)?;
        let mut line = format!("n={n} rank={rank}");
        if m.is_exact() {
            let _ = write!(
                line,
                " exact=true numerical_rank={}",
                numerical_rank(&float, tol)?
            );
        }
        let _ = write!(line, " tol={tol:e}");
        r.line(line);
        r.write(&format!("matrix_n{n}.csv"), &entries_csv(&m.entries))?;
        r.write(&format!("sigma_n{n}.csv"), &vector_csv("sigma", &sigma))?;
        r.check_rank(&format!("n={n}"), rank);
    }
    Ok(())
}

/// Largest distance from a true atom to its nearest recovered atom, or `∞` on a count mismatch.
fn recovery_error(truth: &[(C64, C64)], points: &[C64]) -> f64 {
    if truth.len() != points.len() {
        return f64::INFINITY;
    }
    truth
        .iter()
        .map(|(z, _)| {
            points
                .iter()
                .map(|p| (p - z).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn plain_masses(w: &WeightSpec) -> Option<Vec<(C64, C64)>> {
    let WeightSpec::Points(p) = w else {
        return None;
    };
    p.terms
        .iter()
        .map(|t| match &t.at {
            Location::Complex(z) if z.len() == 1 && t.holo.is_zero() && t.antiholo.is_zero() => {
                Some((z[0], t.coeff))
            }
            _ => None,
        })
        .collect()
}

fn recover_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    r.line(format!("weight={}", weight_summary(&w)));
    let n = *r.cfg.truncations.iter().max().expect("validated nonempty");
    let m = r.matrix(&w, n)?;
    let sec = &r.cfg.recover;
    let opts = RecoveryOptions {
        rel_tol: r.cfg.tol,
        max_condition: sec.max_condition,
        merge_tol: sec.merge_tol,
    };
    let res = recover_point_masses(&m, sec.r_max, &opts)?;
    r.line(format!("n={n}"));
    r.line(res.to_string().trim_end());
    let mut csv = String::from("re,im,coeff_re,coeff_im\n");
    for (z, c) in res.points.iter().zip(&res.coefficients) {
        let _ = writeln!(csv, "{},{}", fmt_c(*z), fmt_c(*c));
    }
    r.write("recovered.csv", &csv)?;
    match plain_masses(&w) {
        Some(truth) => {
            let err = recovery_error(&truth, &res.points);
            r.line(format!("point_error={err:e}"));
            r.check_deviation("point", err);
        }
        None => r.check_deviation("residual", res.residual),
    }
    r.check_rank("recovered", res.rank);
    Ok(())
}

fn vandermonde_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    let WeightSpec::Points(p) = &w else {
        return Err(usage(
            "key `weight`: vandermonde experiments need point masses",
        ));
    };
    let phi = FiniteFunctional::from_points(p)?;
    let sec = r.cfg.vandermonde.clone();
    let defaults = ExpansionBudget::default();
    let budget = ExpansionBudget {
        max_terms: sec.max_terms.map_or(defaults.max_terms, u128::from),
        max_conditions: sec
            .max_conditions
            .map_or(defaults.max_conditions, u128::from),
    };
    r.line(format!("atoms={}", phi.len()));
    if !sec.j.is_empty() {
        let v = vandermonde_vanishing(&phi, &sec.j, &sec.k, &budget)?;
        r.line(format!("value={v}"));
    }
    let ranks = if sec.r.is_empty() && sec.j.is_empty() {
        vec![phi.len().saturating_sub(1)]
    } else {
        sec.r.clone()
    };
    let mut csv =
        String::from("r,degree_bound,exact_rank,all_vanish,conditions_checked,biconditional\n");
    for rk in ranks {
        let d = sec.degree_bound.unwrap_or(rk as u32 + 1);
        let rep = check_lemma_equivalence(&phi, rk, d, &budget)?;
        r.line(rep.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            rep.r,
            rep.degree_bound,
            rep.exact_rank,
            rep.all_vanish,
            rep.conditions_checked,
            rep.biconditional
        );
        r.check(&format!("r={rk} biconditional"), rep.biconditional);
        r.check_rank(&format!("r={rk}"), rep.exact_rank);
    }
    r.write("lemma.csv", &csv)?;
    Ok(())
}

fn sparse_experiment(r: &mut Run) -> Result<(), RunError> {
    let Some(sec) = r.cfg.sparse.clone() else {
        return Err(usage(
            "key `sparse`: section required by `sparse` experiments",
        ));
    };
    let gamma = Direction::from_slice(&sec.direction)?;
    let support: Vec<String> = direction_support(&gamma)
        .iter()
        .map(usize::to_string)
        .collect();
    r.line(format!(
        "direction={} zero_coordinates={{{}}}",
        gamma.gamma(),
        support.join(",")
    ));
    let alphas = (!sec.alphas.is_empty()).then_some(&sec.alphas[..]);
    let v = is_n_sparse(&sec.set, &gamma, sec.n, alphas, sec.horizon)?;
    r.line(format!(
        "N={} sparse={} max_density={:?} worst_base={} margin={:?} margin_guard={:?} horizon={} approximate={}",
        v.n, v.sparse, v.max_density, v.worst_base, v.margin, v.margin_guard, v.horizon, v.approximate
    ));
    let profile = line_density_profile(&sec.set, &gamma, &v.worst_base, sec.horizon, 6)?;
    let mut csv = String::from("horizon,density\n");
    for (h, d) in &profile {
        let _ = writeln!(csv, "{h},{d:?}");
    }
    r.write("density_profile.csv", &csv)?;
    if let Some(want) = r.cfg.expect.sparse {
        r.check(&format!("sparse == {want}"), v.sparse == want);
    }
    if !sec.zset_alphas.is_empty() {
        let z = zset(
            &sec.set,
            &sec.zset_alphas,
            &sec.zset_betas,
            &gamma,
            sec.horizon,
        )?;
        r.line(format!(
            "zset_count={} zset_density={:?} harmonic_sum={:?}",
            z.members.len(),
            z.density,
            z.harmonic_sum
        ));
        let body: String = z.members.iter().map(|t| format!("{t}\n")).collect();
        r.write("zset.csv", &format!("t\n{body}"))?;
    }
    if sec.reduce {
        let w = r.weight()?;
        let n = *r.cfg.truncations.iter().max().expect("validated nonempty");
        let full = r.matrix(&w, n)?;
        let red = reduced_matrix(&full, &sec.set)?;
        let (fr, rr) = (
            matrix_rank(&full, r.cfg.tol)?,
            matrix_rank(&red, r.cfg.tol)?,
        );
        r.line(format!(
            "n={n} full_rank={fr} reduced_shape={}x{} reduced_rank={rr}",
            red.nrows(),
            red.ncols()
        ));
        r.write(&format!("reduced_n{n}.csv"), &entries_csv(&red.entries))?;
        r.check("reduced rank <= full rank", rr <= fr);
        r.check_rank("reduced", rr);
    }
    Ok(())
}

fn landau_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    r.line(format!("weight={}", weight_summary(&w)));
    let sec = r.cfg.landau.clone();
    let cfg_for = |q: u32, n: usize| LandauConfig {
        convention: sec.convention,
        grid_points: sec.grid_points,
        ..LandauConfig::new(sec.b, q, n)
    };
    for &q in &sec.levels {
        r.line(format!("q={q} level={:?}", landau_level(sec.b, q)));
        for &n in &r.cfg.truncations.clone() {
            let (m, rep) = landau_toeplitz(&w, &cfg_for(q, n), r.cfg.tol)?;
            let a = m.to_float();
            let off = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm())
                .fold(0.0, f64::max);
            r.line(format!(
                "q={q} n={n} rank={} max_off_diagonal={off:e} hermitian={}",
                rep.rank,
                rep.eigenvalues.is_some()
            ));
            r.write(&format!("matrix_q{q}_n{n}.csv"), &float_matrix_csv(&a))?;
            match &rep.eigenvalues {
                Some(e) => {
                    let desc: Vec<f64> = e.iter().rev().copied().collect();
                    r.write(
                        &format!("eigenvalues_q{q}_n{n}.csv"),
                        &vector_csv("eigenvalue", &desc),
                    )?;
                }
                None => r.write(
                    &format!("sigma_q{q}_n{n}.csv"),
                    &vector_csv("sigma", &rep.singular_values),
                )?,
            }
            r.check_rank(&format!("q={q} n={n}"), rep.rank);
        }
    }
    if sec.levels.len() > 1 {
        let n = *r.cfg.truncations.iter().max().expect("validated nonempty");
        let top = *sec.levels.iter().max().expect("nonempty");
        let width = cfg_for(top, n).half_width();
        let bases = sec
            .levels
            .iter()
            .map(|&q| {
                landau_basis(&LandauConfig {
                    grid_half_width: Some(width),
                    ..cfg_for(q, n)
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut cross: f64 = 0.0;
        for a in 0..bases.len() {
            for b in a + 1..bases.len() {
                cross = cross.max(cross_gram_max(&bases[a], &bases[b])?);
            }
        }
        r.line(format!("n={n} cross_level_gram={cross:e}"));
        r.check_deviation("cross-level Gram", cross);
    }
    Ok(())
}

fn helmholtz_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    r.line(format!("weight={}", weight_summary(&w)));
    let sec = r.cfg.helmholtz.clone();
    let quad = TransformQuadrature {
        chord_nodes: sec.chord_nodes,
        radial_nodes: sec.radial_nodes,
    };
    for &l in &sec.degrees {
        let size = harmonic_count(l);
        let rep = helmholtz_two_path(&w, size, quad)?;
        let rank = numerical_rank(&rep.transformed.to_float(), r.cfg.tol)?;
        r.line(format!(
            "degree={l} size={size} rank={rank} max_deviation={:e}",
            rep.max_deviation
        ));
        r.write(
            &format!("direct_L{l}.csv"),
            &float_matrix_csv(&rep.direct.to_float()),
        )?;
        r.write(
            &format!("transformed_L{l}.csv"),
            &float_matrix_csv(&rep.transformed.to_float()),
        )?;
        r.check_deviation(&format!("degree={l} two-path"), rep.max_deviation);
        r.check_rank(&format!("degree={l}"), rank);
    }
    Ok(())
}

fn born_experiment(r: &mut Run) -> Result<(), RunError> {
    let w = r.weight()?;
    r.line(format!("weight={}", weight_summary(&w)));
    let mut ranks = Vec::new();
    for kind in r.cfg.born.samplings.clone() {
        let s = SphereSampling::new(kind)?;
        let (k, rep) = born_matrix(&w, &s, r.cfg.tol)?;
        let n = s.len();
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (k[(i, j)] - k[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        r.line(format!(
            "size={n} rank={} hermitian_defect={asym:e}",
            rep.rank
        ));
        r.write(&format!("born_m{n}.csv"), &float_matrix_csv(&k))?;
        r.write(
            &format!("sigma_m{n}.csv"),
            &vector_csv("sigma", &rep.singular_values),
        )?;
        r.check_rank(&format!("size={n}"), rep.rank);
        ranks.push(rep.rank);
    }
    let list: Vec<String> = ranks.iter().map(usize::to_string).collect();
    r.line(format!("ranks=[{}]", list.join(", ")));
    Ok(())
}

fn suite_experiment(r: &mut Run) -> Result<(), RunError> {
    let opts = r
        .cfg
        .seed
        .map_or_else(SuiteOptions::default, |seed| SuiteOptions { seed });
    r.line(format!("seed={}", opts.seed));
    let mut csv = String::from("id,title,passed,detail\n");
    for out in run_suite(&opts) {
        // timings go to stderr so the report is reproducible
        eprintln!("{out}");
        r.line(format!(
            "[{}] {:>2} {}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            out.id,
            out.title,
            out.detail
        ));
        let _ = writeln!(
            csv,
            "{},{},{},\"{}\"",
            out.id,
            out.title,
            out.passed,
            out.detail.replace('"', "'")
        );
        if !out.passed {
            r.failures.push(format!("criterion {}", out.id));
        }
    }
    r.write("suite.csv", &csv)?;
    Ok(())
}
