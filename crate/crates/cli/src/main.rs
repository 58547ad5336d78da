//! `qfisize`: effective sizes and QFI lower bounds from the command line.

mod commands;
mod conventions;
mod error;
mod output;
mod plot;
mod state_args;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{bound, exact, fit, report, simulate};
use error::CliResult;
use output::Output;

#[derive(Debug, Parser)]
#[command(name = "qfisize", version, about = "Quantum Fisher information and effective sizes of macroscopic superpositions")]
struct Cli {
    /// Print the physical conventions (QFI, quadratures, dB references) and exit
    #[arg(long)]
    explain_conventions: bool,
    /// Print a JSON mirror of the report instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact QFI and effective size of a benchmark state
    Exact(exact::ExactArgs),
    /// Lower bounds on the QFI from data or model parameters
    Bound(bound::BoundArgs),
    /// Weighted least-squares fit of a fringe record
    Fit(fit::FitArgs),
    /// Simulate a measurement record from an exact state
    Simulate(simulate::SimulateArgs),
    /// Table of published bounds next to recomputed ones
    Report(report::ReportArgs),
}

fn dispatch(command: &Command) -> CliResult<Output> {
    match command {
        Command::Exact(a) => exact::run(a),
        Command::Bound(a) => bound::run(a),
        Command::Fit(a) => fit::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Report(a) => report::run(a),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.explain_conventions {
        emit(conventions::CONVENTIONS);
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (try --help)");
        return ExitCode::from(2);
    };
    match dispatch(&command) {
        Ok(out) => {
            if cli.json {
                emit(&format!("{}\n", serde_json::to_string_pretty(&out.json).expect("JSON value")));
            } else {
                emit(&out.text);
            }
            match out.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
