mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use gdaha::ErrorClass;

use crate::args::Cli;

fn exit_code(err: &anyhow::Error) -> u8 {
    let class = err.chain().find_map(|e| e.downcast_ref::<gdaha::Error>()).map(gdaha::Error::class);
    match class {
        Some(ErrorClass::Validation) => 2,
        Some(ErrorClass::Convergence) => 3,
        Some(ErrorClass::Certification) => 4,
        Some(ErrorClass::Io) | None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
