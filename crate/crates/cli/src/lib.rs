//! Command-line front end for `bulgaria-core`.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors.

pub mod commands;
pub mod config;

pub use commands::execute;
pub use config::{parse_cli, CommandKind, RunConfig, StartSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(clap::Error),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] bulgaria_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}
