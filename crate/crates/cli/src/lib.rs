//! The `torus-soliton` command line.
//!
//! Exit codes: 0 for success and for the verdicts `stable_on_family` / `semistable_boundary`,
//! 2 for `destabilized`, 3 for the obstructed verdicts, 64 for usage and input errors, 1 for
//! failed checks (non-convergence, golden mismatch, exhausted budget, failed slope rows).

pub mod args;
pub mod commands;
pub mod golden;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use torus_soliton_core::exec::{self, Mode};
use torus_soliton_solver::SolverError;

use args::{Cli, Command};

pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] torus_soliton_core::Error),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => EXIT_USAGE,
            CliError::Solver(SolverError::Core(_) | SolverError::Invalid(_) | SolverError::Unsupported(_)) => {
                EXIT_USAGE
            }
            _ => EXIT_FAILED,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

/// Parse `args` (program name first), run the command writing to `out`, return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    exec::init_threads(exec::threads_from_env());
    let mode = if cli.sequential {
        Mode::Sequential
    } else {
        Mode::Parallel
    };
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a, mode, out),
        Command::EvalTc(a) => commands::eval_tc(a, out),
        Command::JtMin(a) => commands::jt_min(a, out),
        Command::Destabilize(a) => commands::destabilize(a, mode, out),
        Command::Flow(a) => commands::flow(a, mode, out),
        Command::Solve(a) => commands::solve(a, mode, out),
        Command::SlopeCheck(a) => commands::slope_check(a, mode, out),
        Command::Catalog(a) => commands::catalog(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
