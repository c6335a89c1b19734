//! Orchestration behind the `leaky` binary: configuration, experiment runs and artifacts.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use leaky_spectra::{Error, ErrorClass};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// The configuration could not be read or failed validation; the message names the module.
    #[error("configuration error in {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    /// 2 for configuration errors, 3 for numerical failures, 4 for precondition violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Numerics(e) => match e.class() {
                ErrorClass::Numerical => 3,
                ErrorClass::Precondition => 4,
            },
        }
    }
}
