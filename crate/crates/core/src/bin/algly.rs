use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use algly::cli::{run, Cli, Exit, SEED_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = std::env::var(SEED_ENV).ok();
    let outcome = run(&cli, env_seed.as_deref());
    eprint!("{}", outcome.stderr);
    let written = match &cli.out {
        Some(path) if !outcome.stdout.is_empty() => std::fs::write(path, &outcome.stdout),
        _ => std::io::stdout().write_all(outcome.stdout.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("algly: cannot write output: {e}");
        return ExitCode::from(Exit::Parse.code() as u8);
    }
    ExitCode::from(outcome.exit.code() as u8)
}
