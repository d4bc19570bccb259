//! Compensation-based risk sharing with an active or a passive administrator.
//!
//! `n` participants and an administrator invest at time 0; at time 1 the fund
//! is split according to a relative compensation vector produced by a
//! [`rules::Rule`]. The crate evaluates rules, computes expected shares
//! exactly or by simulation, checks and solves for actuarially fair
//! investments, and simulates payouts against the centralized-insurance
//! benchmark.
//!
//! Agent vectors always have length `n + 1`, administrator last. Participant
//! indices in the API are zero-based.

pub mod error;
pub mod expectation;
pub mod fairness;
pub mod rules;
pub mod scheme;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use expectation::{BernoulliModel, ExpectationReport, LossSampler, Method, MethodChoice};
pub use rules::{BoundRule, CustomRule, IndicatorScenario, LossScenario, Rule, Scenario, UnitStrategy};
pub use scheme::{CompensationVector, InvestmentVector, Mode, RelativeShareVector};
