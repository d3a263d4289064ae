//! `abc`: verify, search for, and reduce ABC/Szpiro triples.
//!
//! Exit codes: 0 success, 1 failed numeric check (sum mismatch, failed
//! table row), 2 bad input (parse/flag errors), 3 unwritable output.

mod args;
mod commands;

use clap::Parser;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "abc",
    about = "Find and verify high-quality ABC and Szpiro triples via exact lattice reduction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    cli.command.run()
}
