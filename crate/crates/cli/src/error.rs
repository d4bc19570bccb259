use std::process::ExitCode;

use poolshare::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Compute(Error),
    #[error("solver failure: {0}")]
    Solver(Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Output(_) => 3,
            CliError::Solver(_) => 4,
        })
    }
}

/// Library errors raised while building objects from the config.
pub fn config(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn compute(e: Error) -> CliError {
    CliError::Compute(e)
}

/// Solver errors that mean "no fair scheme found" map to the solver exit
/// code; anything else is a computation error.
pub fn solver(e: Error) -> CliError {
    match e.root() {
        Error::NoConvergence { .. } | Error::DegenerateModel(_) | Error::AnchorInfeasible(_) => CliError::Solver(e),
        Error::NonPositiveAnchor(_) | Error::InvalidSettings(_) => CliError::Config(e.to_string()),
        _ => CliError::Compute(e),
    }
}
