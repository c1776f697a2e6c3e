//! IO, file formats, and the command-line front-end of the UAV
//! base-station energy simulator. The models themselves live in
//! `aerocell-core`.

pub mod cli;
pub mod config;
pub mod emit;
pub mod runner;
pub mod weather_io;

use std::path::PathBuf;

/// Errors surfaced by the front-end, mapped onto process exit codes:
/// configuration and input problems exit 2, I/O problems exit 3.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io { .. } => 3,
        }
    }
}

impl From<aerocell_core::sim::SimError> for AppError {
    fn from(e: aerocell_core::sim::SimError) -> Self {
        Self::Config(e.to_string())
    }
}
