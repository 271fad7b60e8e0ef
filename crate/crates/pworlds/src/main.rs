use std::io;
use std::process::ExitCode;

use clap::Parser;

use pworlds::cli::{run, Cli};
use pworlds::CliError;
use pworlds_core::Error as CoreError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(CoreError::Inconsistent { clashing, .. }) = &e {
                for c in clashing {
                    eprintln!("  clashing: {c}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
