//! Scenario-driven front end for `renyi-core`: reads a JSON scenario, runs one
//! command and writes CSV tables with JSON sidecars.

pub mod commands;
pub mod output;
pub mod scenario;

pub use commands::{run, Command};
pub use output::{Options, Sidecar};
pub use scenario::{parse_scenario, Overrides, Resolved, Scenario};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario: {0}")]
    Scenario(String),

    #[error("{0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("output: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

impl From<renyi_core::Error> for CliError {
    fn from(e: renyi_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}
