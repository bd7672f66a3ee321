//! `zetaforms`: linear forms in zeta values, oscillating subsequences and the
//! bounds they give, from the command line.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CriterionArgs, DensityArgs, FormArgs, Outcome, SubseqArgs};
use error::CliError;
use output::{emit, Format};

#[derive(Debug, Parser)]
#[command(name = "zetaforms", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the n-th linear form exactly and check it against a direct sum.
    Form(FormArgs),
    /// Build and enumerate an oscillating subsequence for angle pairs.
    Subseq(SubseqArgs),
    /// Count orbit points of n theta in a box.
    Density(DensityArgs),
    /// Dimension and irrationality-exponent bounds from growth rates.
    Criterion(CriterionArgs),
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Form(a) => commands::form(a),
        Command::Subseq(a) => commands::subseq(a),
        Command::Density(a) => commands::density(a),
        Command::Criterion(a) => commands::criterion(a),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("zetaforms: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(outcome.rendered.select(cli.format), cli.output.as_deref()) {
        return fail(&e);
    }
    match outcome.failure {
        Some(e) => fail(&e),
        None => ExitCode::SUCCESS,
    }
}
