//! `swdft` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 memory budget exceeded, 4 any other error.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use swdft::SwdftError;

use args::{Cli, Command};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verify,
    Lib(SwdftError),
}

impl From<SwdftError> for Failure {
    fn from(e: SwdftError) -> Self {
        Failure::Lib(e)
    }
}

fn threads(command: &Command) -> u32 {
    match command {
        Command::Transform(a) => a.common.threads,
        Command::Verify(a) => a.common.threads,
        Command::Bench(a) => a.threads,
        Command::Opcount(_) => 1,
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads(&cli.command) as usize)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    match &cli.command {
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a),
        Command::Bench(a) => commands::bench(a),
        Command::Opcount(a) => commands::opcount(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e @ SwdftError::BudgetExceeded { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Lib(
            e @ (SwdftError::InvalidWindow(_)
            | SwdftError::WindowTooLarge { .. }
            | SwdftError::RankMismatch { .. }),
        )) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}
