use std::process::ExitCode;

use clap::Parser;
use selgps_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(()) | Err(selgps_cli::CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("selgps: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
