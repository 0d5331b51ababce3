//! Command-line driver for the uncertainty-relation laboratory.
//!
//! Four verbs: `sweep` tabulates the conditional reverse relation over a
//! parameter grid of the two-qubit thermal model, `audit` stress-tests the
//! library's exact identities and bound validity on random states, `figure`
//! emits figure-ready tables with provenance headers, and `state` dumps one
//! model point in full with closed-vs-numeric cross-checks.
//!
//! Exit codes: 0 success, 1 usage error, 2 invariant violation or computation
//! abort (a counterexample is reported), 3 I/O failure.
//!
//! All tabular output is deterministic: the same flags produce byte-identical
//! tables regardless of `--workers`.

pub mod audit;
pub mod cli;
pub mod figures;
pub mod parse;
pub mod rows;
pub mod statedump;
pub mod sweep;
pub mod textfmt;

use clap::Parser;
use cli::{Cli, Cmd};
use std::path::Path;

/// Classified failure carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or argument values (exit 1).
    Usage(String),
    /// A certified invariant failed or a computation aborted (exit 2).
    Violation(String),
    /// Filesystem or stream failure (exit 3).
    Io(String),
}

impl CliError {
    /// Process exit code for this failure class.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Violation(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Human-readable description.
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Violation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parse the process arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Cmd::Sweep(args) => sweep::run(&args),
        Cmd::Audit(args) => audit::run(&args),
        Cmd::Figure(args) => figures::run(&args),
        Cmd::State(args) => statedump::run(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("urcli: {}", e.message());
            e.code()
        }
    }
}

/// Write `text` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
