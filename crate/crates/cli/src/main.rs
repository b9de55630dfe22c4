//! `permtypical` — command-line front end for the permtypical library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration error,
//! 3 computation infeasible at the requested size.

mod commands;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "permtypical", version, about = "Typicality of permuted i.i.d. sequences: permutations, counts, bounds and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect permutations and build standard permutations.
    #[command(subcommand)]
    Perm(PermCommand),
    /// Permutation counts with their closed-form bounds.
    #[command(subcommand)]
    Count(CountCommand),
    /// Explicit upper bounds on the typicality probability over a parameter grid.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Estimate the probability that permuted sequences are jointly typical.
    Simulate(SimulateArgs),
    /// Run the invariance and bound-soundness checks; exit 1 on any failure.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
enum PermCommand {
    /// Cycle decomposition, cycle type, fixed points and derangement flag.
    Decompose {
        /// One-line image, e.g. "5 1 4 3 2".
        #[arg(long, conflicts_with = "cycles", required_unless_present = "cycles")]
        image: Option<String>,
        /// Cycle notation, e.g. "(1 5 2)(3 4)".
        #[arg(long)]
        cycles: Option<String>,
        /// Size for --cycles [default: largest element mentioned].
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// The standard permutation of a cycle type: consecutive cycles in the given order, then fixed points.
    Standard {
        /// e.g. "m=2,c=2,lengths=3,2".
        #[arg(long = "type")]
        cycle_type: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct CountOutput {
    /// Add normalized log-count rates and their limits.
    #[arg(long)]
    rates: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CountCommand {
    /// Permutations of [1,n] with exactly m fixed points.
    Fixed {
        /// Sizes: "5", "3,5" or "3..7".
        #[arg(long)]
        n: String,
        /// Fixed-point counts [default: every m in 0..=n].
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        out: CountOutput,
    },
    /// Derangements of [1,n].
    Derangements {
        #[arg(long)]
        n: String,
        #[command(flatten)]
        out: CountOutput,
    },
    /// k-fold derangements: vectors (identity, π_2, ..., π_k) disagreeing pairwise at every index.
    Kfold {
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: CountOutput,
    },
    /// Permutation vectors (identity, π_2, ..., π_k) with a given Bell signature.
    Bell {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated signature in canonical partition order, e.g. "4,0".
        #[arg(long)]
        sig: String,
        #[command(flatten)]
        out: CountOutput,
    },
}

#[derive(Debug, Args)]
struct BoundGrid {
    /// Distribution: a JSON file or one of dsbs:P, bernoulli:P, uniform:AxB, triple.
    #[arg(long, default_value = "dsbs:0.1")]
    dist: String,
    /// Sequence lengths: "100", "10,100" or "10..20" [default: 100; thm2 --sig: the signature total].
    #[arg(long)]
    n: Option<String>,
    /// Typicality slack ε, comma-separated.
    #[arg(long, default_value = "0.01")]
    eps: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BoundCommand {
    /// Any permutation with m fixed points (pair distributions).
    Thm1 {
        #[command(flatten)]
        grid: BoundGrid,
        /// Fixed-point counts; must not exceed n.
        #[arg(long, default_value = "0")]
        m: String,
    },
    /// A single n-cycle.
    Lemma4 {
        #[command(flatten)]
        grid: BoundGrid,
    },
    /// A derangement whose cycles are all shorter than s.
    Lemma5 {
        #[command(flatten)]
        grid: BoundGrid,
        #[arg(long)]
        s: usize,
    },
    /// Any permutation vector with a given Bell signature.
    Thm2 {
        #[command(flatten)]
        grid: BoundGrid,
        /// Expected arity; checked against the distribution.
        #[arg(long)]
        k: Option<usize>,
        /// Signature counts in canonical partition order; n is their sum.
        #[arg(long, conflicts_with = "m", required_unless_present = "m")]
        sig: Option<String>,
        /// For k=2: the signature (n-m, m).
        #[arg(long)]
        m: Option<String>,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON experiment config; replaces the experiment flags below.
    #[arg(long, conflicts_with_all = ["dist", "perm", "n", "eps", "trials", "seed"])]
    config: Option<PathBuf>,
    /// Distribution: a JSON file or one of dsbs:P, bernoulli:P, uniform:AxB, triple.
    #[arg(long, default_value = "dsbs:0.1")]
    dist: String,
    /// Permutation per row: id, image:"5 1 4 3 2", cycles:"(1 2)(3 4)",
    /// standard:"m=1,c=1,lengths=3", random:"m=0,c=2,lengths=2,2". A single spec π means (id, π).
    #[arg(long = "perm")]
    perm: Vec<String>,
    /// Sequence length [default: inferred from the permutations].
    #[arg(long)]
    n: Option<usize>,
    /// Typicality slack ε, comma-separated.
    #[arg(long, default_value = "0.1")]
    eps: String,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core, 1 runs sequentially. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Exact checks that typicality probabilities depend only on the cycle type of π_x⁻¹∘π_y.
    Prop1 {
        /// Pair distribution: a JSON file or a shorthand.
        #[arg(long, default_value = "dsbs:0.1")]
        dist: String,
        #[arg(long, default_value = "4")]
        n: String,
        #[arg(long, default_value = "0.1")]
        eps: String,
        /// Maximum discrepancy accepted.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Seed for sampled permutations when a check is too large to be exhaustive.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Bound-soundness sweep: every bound must dominate the exact probability.
    Bounds {
        #[arg(long, value_enum, default_value_t = commands::Suite::Default)]
        suite: commands::Suite,
        /// Write the per-configuration margins as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
    Verification(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl From<permtypical::Error> for CliError {
    fn from(e: permtypical::Error) -> Self {
        match e {
            permtypical::Error::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
