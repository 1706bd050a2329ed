use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use minpoly_core::matgen::Family;
use minpoly_core::{Epsilon, Error, FieldSpec, SeededRng, VerifyPolicy};

#[derive(Parser, Debug)]
#[command(
    name = "minpoly",
    version,
    about = "Minimal and characteristic polynomials of matrices over finite fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every command.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Field as `P` or `P^K`; must agree with the matrix header when both are present.
    #[arg(long, global = true, value_name = "P[^K]")]
    pub field: Option<String>,
    /// Failure probability as a rational `A/B` with 0 < A/B < 1/2.
    #[arg(long, global = true, default_value = "1/100", value_name = "A/B")]
    pub eps: String,
    /// Random seed; drawn from the operating system when absent.
    #[arg(long, global = true, env = "MINPOLY_SEED")]
    pub seed: Option<u64>,
    /// Deterministic verification strategy.
    #[arg(
        long,
        global = true,
        default_value = "none",
        value_name = "none|loop|eval|nullspace|auto"
    )]
    pub verify: String,
    /// Attach a per-call report of measured operations against their bounds.
    #[arg(long, global = true)]
    pub count_ops: bool,
    /// Skip work for zero scalars in row operations.
    #[arg(long, global = true)]
    pub sparse_skip: bool,
    /// Write the JSON record here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Cross-check against the brute-force oracle (n <= 64).
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo minimal polynomial, optionally verified.
    Minpoly {
        /// Matrix file (`-` for standard input).
        input: PathBuf,
    },
    /// Characteristic polynomial by spinning.
    Charpoly { input: PathBuf },
    /// Checks a candidate minimal polynomial.
    Verify {
        input: PathBuf,
        /// JSON file holding `[{factor, multiplicity}, ...]`, a record with a `minpoly` field,
        /// or a `gen` sidecar.
        /// Without it, the Monte Carlo result of a fresh run is checked.
        #[arg(long, value_name = "PATH")]
        candidate: Option<PathBuf>,
    },
    /// Generates a family member and its sidecar.
    Gen {
        family: Family,
        /// Family parameter N.
        #[arg(long, default_value_t = 10)]
        scale: u32,
        /// Matrix output path; standard output when absent.
        #[arg(long, short, value_name = "PATH")]
        output: Option<PathBuf>,
        /// Keep the block diagonal normal form.
        #[arg(long)]
        no_conjugate: bool,
    },
    /// Runs the families and reports operation counts per phase.
    Bench {
        /// Comma separated family names.
        #[arg(long, value_delimiter = ',', default_value = "m1,m3,m4,m5,m6,m7")]
        families: Vec<Family>,
        /// Fraction of the full experiment size.
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Validated shared settings.
#[derive(Clone, Debug)]
pub struct Config {
    pub field: Option<Arc<FieldSpec>>,
    pub eps: Epsilon,
    pub seed: u64,
    pub verify: VerifyPolicy,
    pub count_ops: bool,
    pub sparse_skip: bool,
    pub json: Option<PathBuf>,
    pub oracle: bool,
}

impl Common {
    pub fn resolve(&self) -> Result<Config, Error> {
        Ok(Config {
            field: self.field.as_deref().map(parse_field).transpose()?,
            eps: parse_eps(&self.eps)?,
            seed: self.seed.unwrap_or_else(SeededRng::entropy_seed),
            verify: VerifyPolicy::from_str(&self.verify)?,
            count_ops: self.count_ops,
            sparse_skip: self.sparse_skip,
            json: self.json.clone(),
            oracle: self.oracle,
        })
    }
}

pub fn parse_field(s: &str) -> Result<Arc<FieldSpec>, Error> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidArgument(format!("bad field `{s}`")))
    };
    match s.split_once('^') {
        Some((p, k)) => {
            let k = u32::try_from(num(k)?)
                .map_err(|_| Error::InvalidArgument(format!("bad field `{s}`")))?;
            FieldSpec::new(num(p)?, k)
        }
        None => FieldSpec::from_order(num(s)?),
    }
}

fn parse_eps(s: &str) -> Result<Epsilon, Error> {
    if !s.contains('/') {
        return Err(Error::EpsilonOutOfRange(format!(
            "{s} (expected a rational A/B)"
        )));
    }
    Epsilon::from_str(s)
}
