//! Front end for the `kmis` command: corpus ingestion, algorithm dispatch,
//! oracle cross-checks and the benchmark sweep.

pub mod bench;
pub mod commands;
pub mod ingest;

pub use commands::{run, Cli};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Algorithm(#[from] kmis::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) | CliError::Algorithm(_) | CliError::Io(_) => 3,
        }
    }
}

/// Exit code of a `verify` run that disagrees with the oracle.
pub const EXIT_MISMATCH: u8 = 1;
