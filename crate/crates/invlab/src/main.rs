use std::process::ExitCode;

use clap::Parser;
use invlab::commands::{run, Command};

/// Numerical experiments on an axisymmetric family of Sobolev maps.
///
/// Exit status: 0 success, 1 acceptance criterion failed, 2 configuration
/// error, 3 numerical abort.
#[derive(Debug, Parser)]
#[command(name = "invlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("invlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
