use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toeplitz_core::assembly::Mode;
use toeplitz_lab::config::{ExperimentConfig, Kind, UsageError};
use toeplitz_lab::run::{run, RunError};

#[derive(Parser, Debug)]
#[command(
    name = "toeplitz-lab",
    version,
    about = "Truncated Toeplitz matrices, their ranks and the acceptance suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative rank tolerance; overrides `tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Exact rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    /// Worker threads for entry fills.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Assemble the truncated matrices and write them as CSV.
    Assemble,
    /// Ranks and singular values per truncation.
    Rank,
    /// Recover point masses from a moment matrix.
    Recover,
    /// Vanishing conditions against the exact rank.
    Vandermonde,
    /// Line densities, sparseness and Z-sets of an index set.
    Sparse,
    /// Toeplitz spectra on Landau levels.
    Landau,
    /// Helmholtz-space matrices along both computation paths.
    Helmholtz,
    /// Born kernels over sphere samplings.
    Born,
    /// The full acceptance list.
    Suite,
}

impl Command {
    fn kind(self) -> Kind {
        match self {
            Command::Assemble => Kind::Assemble,
            Command::Rank => Kind::Rank,
            Command::Recover => Kind::Recover,
            Command::Vandermonde => Kind::Vandermonde,
            Command::Sparse => Kind::Sparse,
            Command::Landau => Kind::Landau,
            Command::Helmholtz => Kind::Helmholtz,
            Command::Born => Kind::Born,
            Command::Suite => Kind::Suite,
        }
    }
}

fn configure(cli: &Cli) -> Result<(ExperimentConfig, PathBuf), UsageError> {
    let kind = cli.command.kind();
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::empty(kind),
    };
    match cfg.kind {
        Some(k) if k != kind => {
            return Err(UsageError(format!(
                "key `kind`: config declares `{k}` but the subcommand is `{kind}`"
            )))
        }
        _ => cfg.kind = Some(kind),
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if cli.exact {
        cfg.mode = Mode::Exact;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    Ok((cfg, dir))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let (cfg, dir) = match configure(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg, &dir) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            println!("artifacts in {}", dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e @ RunError::Usage(_)) | Err(e @ RunError::Compute(_)) | Err(e @ RunError::Io(..)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
