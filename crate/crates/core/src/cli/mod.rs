//! The `algly` command line: argument parsing, problem loading, and the six
//! subcommands. [`run`] is pure apart from reading input files, so the
//! binary only prints and exits.

mod commands;
mod problem;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use problem::{
    FieldSpec, ProblemError, ProblemFile, ProblemOptions, DEFAULT_H, DEFAULT_INVARIANCE_DIRS,
    DEFAULT_LEVELS, DEFAULT_N_THETA, DEFAULT_T,
};

/// Environment variable that overrides the seed in the problem file.
pub const SEED_ENV: &str = "ALGLY_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Homogeneous parts M_0..M_p and the homogenized polynomial.
    Decompose,
    /// τ(x) at the point given by --x.
    Tau,
    /// All Lyapunov conditions, as a JSON bundle.
    Verify,
    /// Level sets of τ as CSV (two variables only).
    Contour,
    /// RK4 trajectory with τ and τ̇ columns as CSV.
    Simulate,
    /// Multiplier or Gram certificate verification.
    Cert,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "algly", version, about = "Algebraic Lyapunov functions from polynomial invariant sets")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON problem file.
    #[arg(long)]
    pub problem: PathBuf,
    /// Evaluation point (`tau`) or initial state (`simulate`).
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    /// Contour levels.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long = "n-theta")]
    pub n_theta: Option<usize>,
    /// RK4 step.
    #[arg(long)]
    pub h: Option<f64>,
    /// Integration horizon.
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Required invariance margin: pass only if ∇P·f < -δ on the boundary.
    #[arg(long = "strict-tol")]
    pub strict_tol: Option<f64>,
    /// Certificate file for `cert` (Gram or multiplier JSON).
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    CheckFailed = 1,
    Parse = 2,
    NoRoot = 3,
    MultiRoot = 4,
    UnsupportedDimension = 5,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// What a command produced: the report body, diagnostics, and exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit: Exit,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(exit: Exit, stdout: String) -> Self {
        Outcome {
            exit,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(exit: Exit, message: impl std::fmt::Display) -> Self {
        Outcome {
            exit,
            stdout: String::new(),
            stderr: format!("algly: {message}\n"),
        }
    }
}

/// Runs one command. `env_seed` is the value of `ALGLY_SEED`, if set.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> Outcome {
    let problem = match ProblemFile::from_path(&cli.problem) {
        Ok(p) => p,
        Err(e) => return Outcome::error(Exit::Parse, e),
    };
    let env_seed = match env_seed.map(|s| s.trim().parse::<u64>()) {
        None => None,
        Some(Ok(s)) => Some(s),
        Some(Err(e)) => return Outcome::error(Exit::Parse, format!("{SEED_ENV}: {e}")),
    };
    let seed = cli.seed.or(env_seed).or(problem.options.seed).unwrap_or(0);
    let ctx = commands::Context {
        cli,
        problem: &problem,
        seed,
    };
    match cli.command {
        Command::Decompose => commands::decompose(&ctx),
        Command::Tau => commands::tau(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Contour => commands::contour(&ctx),
        Command::Simulate => commands::simulate(&ctx),
        Command::Cert => commands::cert(&ctx),
    }
}
