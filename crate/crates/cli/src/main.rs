use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Verification suites for positive definite kernels and their spectral measures.
#[derive(Parser, Debug, Clone)]
#[command(name = "bochner", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Catalog pair, repeatable or comma separated.
    #[arg(long = "pair", global = true, value_delimiter = ',')]
    pub pairs: Vec<String>,
    /// Test function (gaussian, indicator, bspline3, bump); an empty value selects none.
    #[arg(long = "phi", global = true, value_delimiter = ',')]
    pub phis: Option<Vec<String>>,
    /// Pass threshold; each command documents its default.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Double-integral norm against the spectral norm (default tol: rel_err 1e-6).
    Isometry,
    /// Dirac comb: Poisson x-side against the atom sum (default tol: 1e-9).
    Comb {
        #[arg(long, default_value_t = 16)]
        truncation: usize,
    },
    /// Scale-4 Cantor spectral pair and the scale-3 obstruction search (default tol: 1e-8).
    Cantor {
        /// Number of leading elements of the spectrum.
        #[arg(long, default_value_t = 16)]
        size: usize,
    },
    /// Stationary-increment Gaussian process by Monte Carlo (default tol: 3 standard errors).
    Gp {
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
    },
    /// Exact isometry on Z_N (default tol: rel_err 1e-12).
    Abelian {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum CatalogAction {
    List,
}

/// Usage or configuration problem.
const EXIT_CONFIG: u8 = 1;
/// A verification exceeded its tolerance.
const EXIT_FAIL: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(commands::CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(commands::CliError::Compute(msg)) => {
            eprintln!("verification error: {msg}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
