//! `cue-lab`: verification tables for unitary-group moments, contingency
//! counts, and their function-field analogues.
//!
//! Exit codes: 0 all checks pass, 1 some asserted check failed, 2 usage
//! error, 3 a resource limit was hit.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cue_lab_core::cue::MomentKind;
use cue_lab_core::lfunc::{Constraint, Twist};
use cue_lab_core::{Error, Limits, Partition};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "cue-lab", version, about = "Exact and sampled checks of CUE moment identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Secular moments against matrix counts for all μ, μ̃ ⊢ n ≤ n-max.
    VerifyDg {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Matrix sizes, "a..b" (inclusive) or a single value.
        #[arg(long = "N", default_value = "1..8", value_parser = parse_range)]
        n_range: (usize, usize),
    },
    /// Symmetric-power moments against matrix counts.
    VerifyTrsym {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long = "N", default_value = "1..8", value_parser = parse_range)]
        n_range: (usize, usize),
    },
    /// Direct, Kostka and S_n-average matrix counts side by side.
    VerifyKostka {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// Divisor correlation sums over F_q[T], fitted as a polynomial in q.
    FfScan {
        #[arg(long, value_parser = parse_partition)]
        mu: Partition,
        #[arg(long, value_parser = parse_partition)]
        mu_tilde: Partition,
        /// Degree of the summed polynomials (defaults to |μ|).
        #[arg(long)]
        n: Option<usize>,
        /// Field sizes used for fitting, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 11)]
        holdout: u64,
    },
    /// Character moments modulo Q against the product-equation count.
    CharMoments {
        /// Modulus as "c0,c1,...@q=Q", constant term first.
        #[arg(long = "Q")]
        modulus: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "none", value_parser = parse_twist)]
        twist: Twist,
    },
    /// Root and coefficient checks for every odd primitive character mod Q.
    Theta {
        #[arg(long = "Q")]
        modulus: String,
    },
    /// Normalized character moments for growing q beside N_{(n^k),(n^k)}.
    /// Reported only.
    KatzTrend {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,11")]
        primes: Vec<u64>,
    },
    /// Integer counts M_k(x). Reported only.
    IntegerMk {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = false)]
        squarefree: bool,
    },
    /// Monte Carlo moment estimate against the exact value.
    Mc {
        #[arg(long, default_value = "secular", value_parser = parse_kind)]
        kind: MomentKind,
        /// Exponents of X_1, X_2, ... (comma separated).
        #[arg(long, default_value = "1", value_parser = parse_counts)]
        a: Counts,
        /// Exponents of the conjugates.
        #[arg(long, default_value = "1", value_parser = parse_counts)]
        b: Counts,
        #[arg(long = "N", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected \"a..b\" or a single integer, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => Ok((
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            Ok((v, v))
        }
    }
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_twist(s: &str) -> Result<Twist, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<MomentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exponent vector given as one flag value; a bare `Vec` would make clap
/// expect repeated flags.
#[derive(Debug, Clone)]
struct Counts(Vec<usize>);

/// A single flag value like "0,1" (empty for the zero vector).
fn parse_counts(s: &str) -> Result<Counts, String> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Ok(Counts(Vec::new()));
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad exponent {t:?}")))
        .collect::<Result<_, _>>()
        .map(Counts)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::LimitExceeded { .. } => 3,
        Error::Numeric(_) => 1,
        _ => 2,
    }
}

fn run(cli: &Cli, limits: &Limits) -> Result<output::Table, Error> {
    match &cli.command {
        Command::VerifyDg { n_max, n_range } => commands::verify_moments(MomentKind::Secular, *n_max, *n_range, limits),
        Command::VerifyTrsym { n_max, n_range } => {
            commands::verify_moments(MomentKind::SymmetricPower, *n_max, *n_range, limits)
        }
        Command::VerifyKostka { n_max } => commands::verify_kostka(*n_max, limits),
        Command::FfScan {
            mu,
            mu_tilde,
            n,
            primes,
            holdout,
        } => commands::ff_scan(mu, mu_tilde, n.unwrap_or(mu.size()), primes, *holdout, limits),
        Command::CharMoments { modulus, n, k, twist } => {
            commands::char_moments(&commands::parse_modulus(modulus)?, *n, *k, *twist, limits)
        }
        Command::Theta { modulus } => commands::theta(&commands::parse_modulus(modulus)?, limits),
        Command::KatzTrend { d, n, k, primes } => commands::katz_trend(*d, *n, *k, primes, limits),
        Command::IntegerMk { x, k, squarefree } => {
            let constraint = if *squarefree {
                Constraint::Squarefree
            } else {
                Constraint::None
            };
            commands::integer_mk(*x, *k, constraint, limits)
        }
        Command::Mc {
            kind,
            a,
            b,
            n,
            samples,
            seed,
        } => commands::mc(*kind, &a.0, &b.0, *n, *samples, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = Limits::from_env();
    let table = match run(&cli, &limits) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cue-lab: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|f| table.write(cli.format, BufWriter::new(f))),
        None => table.write(cli.format, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("cue-lab: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if table.failures > 0 {
        eprintln!("cue-lab: {} check(s) failed", table.failures);
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
