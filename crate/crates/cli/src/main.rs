//! Binary entry point: parse, run, and map failures to exit codes.

use std::process::ExitCode;

fn main() -> ExitCode {
    match hurwitz_cli::run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("hurwitz: {err}");
            err.exit_code()
        }
    }
}
