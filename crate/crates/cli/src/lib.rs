//! Library side of the `selgps` command-line tool. The binary only parses
//! arguments and maps [`CliError`] to an exit status.

pub mod args;
pub mod compare;
pub mod energy;
pub mod generate;
pub mod output;
pub mod run;

use std::io::Write;

use selgps::Error;

pub use args::{Cli, Command};
pub use compare::{compare_policies, CompareSummary, PolicyEntry, SeedRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("run failed: {0}")]
    Run(String),
    /// The reader of stdout went away.
    #[error("output closed")]
    Closed,
}

impl CliError {
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const RUN: i32 = 4;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => Self::USAGE,
            CliError::Parse(_) => Self::PARSE,
            CliError::Run(_) => Self::RUN,
            CliError::Closed => 0,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => CliError::Parse(m),
            Error::InvalidValue { .. } | Error::InvalidOperatingPoint(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::Closed;
        }
        CliError::Run(e.to_string())
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => generate::cmd_generate(a, stdout),
        Command::Run(a) => run::cmd_run(a, stdout),
        Command::Compare(a) => compare::cmd_compare(a, stdout),
        Command::Energy(a) => energy::cmd_energy(a, stdout),
    }
}
