use std::process::ExitCode;

use clap::Parser;
use infowell::cli::{execute, Cli};

fn main() -> ExitCode {
    ExitCode::from(execute(&Cli::parse()))
}
