//! `alloyrep`: checks, builders and experiments for alloys and their
//! representations. Reports go to stdout as JSON, a summary to stderr.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use alloyrep::ToleranceConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::CliError;

#[derive(Parser)]
#[command(
    name = "alloyrep",
    version,
    about = "Alloys, quaternary algebras and asl(2) representations"
)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, global = true, env = "ALLOYREP_RANK_TOL", default_value_t = 1e-9)]
    rank_tol: f64,
    /// Relative threshold for identity checks.
    #[arg(
        long,
        global = true,
        env = "ALLOYREP_RESIDUAL_TOL",
        default_value_t = 1e-9
    )]
    residual_tol: f64,
    /// Eigenvalue clustering distance.
    #[arg(
        long,
        global = true,
        env = "ALLOYREP_EIGEN_GAP_TOL",
        default_value_t = 1e-7
    )]
    eigen_gap_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CheckKind {
    Algebra,
    Alloy,
    Rep,
    Cross,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GenerateKind {
    /// A random quaternary algebra (`--n`).
    Quaternary,
    /// An alloyable pair with a known factorization (`--n`, `--m`).
    Planted,
    /// Random matrices for sl(2) and a one-dimensional abelian partner.
    Cross,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSON file of the given kind.
    Check { kind: CheckKind, path: PathBuf },
    /// Build an asl(2) representation from block sizes or a classical spin.
    #[command(name = "build-asl2")]
    BuildAsl2 {
        /// Block sizes, e.g. 1,2,1.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "spin",
            required_unless_present = "spin"
        )]
        dims: Option<Vec<usize>>,
        /// γ as RE or RE,IM.
        #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// The classical (N+1)-dimensional module.
        #[arg(long, value_name = "N")]
        spin: Option<usize>,
        /// Representation file; parameters go next to it as *.params.json.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decompose the tensor product of two representations.
    #[command(name = "tensor-decompose")]
    TensorDecompose {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sample asl(2) representations of one total dimension and cross-check
    /// the block conditions against irreducibility.
    Classify {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "0.37,0.21", allow_hyphen_values = true)]
        gamma: String,
        /// Allow dimensions above 8.
        #[arg(long)]
        force: bool,
        /// Directory for counterexample files.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify, construct or search for a mutual factorization.
    Alloyability(AlloyabilityArgs),
    /// Write random or planted inputs.
    Generate {
        kind: GenerateKind,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// File (quaternary, cross) or directory (planted).
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
pub struct AlloyabilityArgs {
    #[arg(long)]
    q1: Option<PathBuf>,
    #[arg(long)]
    q2: Option<PathBuf>,
    /// Check this factorization of (q1, q2).
    #[arg(long, conflicts_with_all = ["canonical", "search"])]
    factorization: Option<PathBuf>,
    /// Build the canonical partner of this quaternary algebra.
    #[arg(long, value_name = "Q1", conflicts_with_all = ["q1", "q2", "search"])]
    canonical: Option<PathBuf>,
    /// Search for a factorization of (q1, q2).
    #[arg(long)]
    search: bool,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the factorization (and partner) files.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<report::RunReport, CliError> {
    let tol = ToleranceConfig::new(
        cli.tol.rank_tol,
        cli.tol.residual_tol,
        cli.tol.eigen_gap_tol,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Check { kind, path } => commands::check(kind, &path, tol),
        Command::BuildAsl2 {
            dims,
            gamma,
            seed,
            spin,
            output,
        } => commands::build_asl2(dims, &gamma, seed, spin, &output, tol),
        Command::TensorDecompose { a, b, seed, output } => {
            commands::tensor_decompose(&a, &b, seed, &output, tol)
        }
        Command::Classify {
            dim,
            trials,
            seed,
            gamma,
            force,
            output,
        } => commands::classify(dim, trials, seed, &gamma, force, output.as_deref(), tol),
        Command::Alloyability(args) => commands::alloyability(args, tol),
        Command::Generate {
            kind,
            n,
            m,
            seed,
            output,
        } => commands::generate(kind, n, m, seed, &output, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            // a closed pipe downstream is not an error of the run
            let _ = writeln!(std::io::stdout(), "{text}");
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("alloyrep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
