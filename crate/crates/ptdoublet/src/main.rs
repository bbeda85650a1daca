use std::process::ExitCode;

use clap::Parser;
use ptdoublet::cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    ExitCode::from(ptdoublet::run(&cli, ptdoublet::env_out().as_deref()))
}
