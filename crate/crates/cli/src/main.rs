//! `manifest` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or input error, 3 numerical
//! failure (degenerate data, non-SPD kernels on the SPD-only path).

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use manifest_core::Error;

use crate::args::{Cli, Command};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e.root() {
            Error::InvalidInput(_) | Error::Parse { .. } => EXIT_INPUT,
            Error::NotPositiveDefinite { .. }
            | Error::DegenerateData(_)
            | Error::GeodesicDomain { .. }
            | Error::NotSharedEigenvector { .. } => EXIT_NUMERIC,
            Error::Io(_) | Error::Stage { .. } => EXIT_IO,
        };
    }
    EXIT_IO
}

/// Context messages and the root cause, with stage wrappers folded into a tag.
fn describe(err: &anyhow::Error) -> String {
    let parts: Vec<String> = err
        .chain()
        .filter(|cause| !matches!(cause.downcast_ref::<Error>(), Some(Error::Stage { .. })))
        .map(ToString::to_string)
        .collect();
    match err.downcast_ref::<Error>().and_then(Error::stage) {
        Some(stage) => format!("error [stage: {stage}]: {}", parts.join(": ")),
        None => format!("error: {}", parts.join(": ")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(a) => commands::score(&a),
        Command::BenchXor(a) => commands::bench_xor(&a),
        Command::BenchHypercube(a) => commands::bench_hypercube(&a),
        Command::DumpOperators(a) => commands::dump_operators(&a),
        Command::Generate(a) => commands::generate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", describe(&err));
            ExitCode::from(exit_code(&err))
        }
    }
}
