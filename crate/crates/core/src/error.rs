use thiserror::Error;

use crate::scheme::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // Construction and validation of domain values.
    #[error("a scheme needs at least one participant and the administrator (got {0} agents)")]
    TooFewAgents(usize),
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("investment {index} is negative ({value})")]
    NegativeInvestment { index: usize, value: f64 },
    #[error("at least one participant must make a positive investment")]
    NoPositiveParticipant,
    #[error("a passive administrator cannot invest (got {0})")]
    PassiveAdminInvestment(f64),
    #[error("share {index} is negative ({value})")]
    NegativeShare { index: usize, value: f64 },
    #[error("share {index} exceeds 1 ({value})")]
    ShareAboveOne { index: usize, value: f64 },
    #[error("shares sum to {0}, expected 1")]
    SumNotOne(f64),
    #[error("administrator share {admin} is inconsistent with participant shares summing to {participants}")]
    ExclusivityViolated { admin: f64, participants: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation requires {expected:?} mode, scheme is {found:?}")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error("scale factor must be positive (got {0})")]
    NonPositiveScale(f64),

    // Rules.
    #[error("loss {index} is negative ({value})")]
    NegativeLoss { index: usize, value: f64 },
    #[error("indicator {index} must be 0 or 1 (got {value})")]
    NonBinaryIndicator { index: usize, value: u8 },
    #[error("unit {index} must be strictly positive (got {value})")]
    NonPositiveUnit { index: usize, value: f64 },
    #[error("probability {index} is zero but the unit strategy divides by it")]
    ZeroProbability { index: usize },
    #[error("unit strategy needs survival probabilities")]
    MissingProbabilities,
    #[error("rule cannot evaluate this scenario: {0}")]
    RuleScenarioMismatch(String),
    #[error("scenario {scenario}: {source}")]
    InScenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    // Expectations.
    #[error("probability {index} outside [0,1] ({value})")]
    ProbOutOfRange { index: usize, value: f64 },
    #[error("exact enumeration supports at most {max} participants (got {n})")]
    TooManyParticipants { n: usize, max: usize },
    #[error("participant index {index} out of range for {n} participants")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("probability {0} is degenerate for this operation")]
    DegenerateProbability(f64),
    #[error("Monte Carlo needs at least {min} samples (got {got})")]
    InsufficientSamples { got: usize, min: usize },
    #[error("invalid distribution parameter: {0}")]
    InvalidDistribution(String),

    // Fairness.
    #[error("model is degenerate: Pr[administrator takes all] = {0}")]
    DegenerateModel(f64),
    #[error("anchor cannot be met: {0}")]
    AnchorInfeasible(String),
    #[error("anchor value must be positive (got {0})")]
    NonPositiveAnchor(f64),
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    #[error("no convergence after {iterations} iterations (last relative change {last_change:e}, max residual {max_residual:e})")]
    NoConvergence {
        iterations: usize,
        last_change: f64,
        max_residual: f64,
    },
    #[error("fair relative share {0} lies outside [0,1]")]
    InfeasibleBeta(f64),

    // Simulation.
    #[error("path {path}: {source}")]
    OnPath {
        path: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("need at least one path")]
    NoPaths,
}

impl Error {
    pub(crate) fn in_scenario(self, scenario: impl std::fmt::Debug) -> Self {
        Error::InScenario {
            scenario: format!("{scenario:?}"),
            source: Box::new(self),
        }
    }

    pub(crate) fn on_path(self, path: u64) -> Self {
        Error::OnPath {
            path,
            source: Box::new(self),
        }
    }

    /// Innermost error, with scenario and path tags removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::InScenario { source, .. } | Error::OnPath { source, .. } => source.root(),
            other => other,
        }
    }
}
