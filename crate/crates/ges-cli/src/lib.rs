//! Library surface of the experiment runner: everything the `ges` binary
//! does is callable in-process, which is how the integration and acceptance
//! suites drive it.

pub mod aggregate;
pub mod config;
pub mod experiment;
pub mod gradcheck;
pub mod sweep;

use thiserror::Error;

/// Exit codes: 0 ok, 1 config error, 2 runtime failure, 3 check failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
    #[error("check failure: {0}")]
    Check(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    pub fn check(msg: impl Into<String>) -> Self {
        CliError::Check(msg.into())
    }

    pub fn from_core(e: ges_core::Error) -> Self {
        match e {
            ges_core::Error::InvalidConfig(_) | ges_core::Error::GapOutOfRange { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}
