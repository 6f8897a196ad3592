//! Entry point: parse arguments, dispatch, and map failures to exit codes
//! (0 success, 1 usage/config error, 2 success with physicality projection,
//! 3 I/O error). Exit codes are part of the tool's contract.

mod args;
mod commands;
mod io;
mod model;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// I/O failures exit 3; everything else is a usage/config error, exit 1.
fn classify(err: &anyhow::Error) -> u8 {
    if err
        .chain()
        .any(|cause| cause.downcast_ref::<std::io::Error>().is_some())
    {
        3
    } else {
        1
    }
}
