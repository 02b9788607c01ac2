mod cache;
mod cli;
mod commands;
mod relations_cmd;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mzf_core::Error;

use crate::cache::Cache;
use crate::cli::{Cli, Command, Format};

pub struct Settings {
    pub format: Format,
    pub cache: Cache,
    pub parallel: usize,
    pub max_n: u64,
    pub max_weight: u32,
    pub max_rows: u64,
}

/// An error message with its process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: String) -> Self {
        Failure { code: 1, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) => 2,
            Error::Parse(_) | Error::Invalid(_) | Error::Index(_) => 3,
            Error::Budget(_) => 4,
            Error::NonAdmissible { .. } => 5,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let settings = Settings {
        format: cli.format,
        cache: Cache::open(cli.cache_dir),
        parallel: cli.parallel as usize,
        max_n: cli.max_n,
        max_weight: cli.max_weight,
        max_rows: cli.max_rows,
    };
    match &cli.command {
        Command::Eval(a) => commands::eval(a, &settings),
        Command::Domain(a) => commands::domain(a, &settings),
        Command::Decompose(a) => commands::decompose(a, &settings),
        Command::Relations(a) => relations_cmd::relations(a, &settings),
        Command::Rank(a) => relations_cmd::rank(a, &settings),
        Command::Table1(a) => relations_cmd::table1(a, &settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
