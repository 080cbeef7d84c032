//! `binfwd` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 budget refusal,
//! 4 no feasible input distribution found.

mod args;
mod commands;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, Result};

fn execute(cli: Cli) -> Result<()> {
    let command = cli.command;
    let out = match &command {
        Command::Replay(a) => a.out.clone(),
        c => c.out().cloned(),
    };
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Validation("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| commands::run(command))?;
    commands::emit(&outcome, out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
