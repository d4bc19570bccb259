//! Actuarial fairness: every agent's investment equals its expected payout.
//!
//! Fair investment vectors are only determined up to a positive factor, so
//! every solver takes an [`Anchor`] that fixes the scale.

mod fixed_point;
mod two_participant;

pub use fixed_point::{solve_fair_fixed_point, FixedPointSolution, SolverSettings};
pub use two_participant::{
    beta_for_fair_investments, beta_from_units, two_participant_passive_from_first,
    two_participant_tontine_fair,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::ExpectationReport;
use crate::scheme::{InvestmentVector, Mode};

/// Default absolute residual tolerance per unit of scale.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Residual tolerance for a scheme: [`DEFAULT_RELATIVE_TOLERANCE`] times the
/// total investment.
pub fn default_tolerance(inv: &InvestmentVector) -> f64 {
    DEFAULT_RELATIVE_TOLERANCE * inv.total()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessReport {
    /// `pi_i - E[W_i]` for every agent; the passive administrator's entry is 0.
    pub residuals: Vec<f64>,
    pub expected_payouts: Vec<f64>,
    pub max_abs_residual: f64,
    pub fair: bool,
    pub mode: Mode,
    pub tolerance: f64,
}

impl FairnessReport {
    fn new(residuals: Vec<f64>, expected_payouts: Vec<f64>, mode: Mode, tolerance: f64) -> Self {
        let checked = match mode {
            Mode::Active => residuals.len(),
            Mode::Passive => residuals.len() - 1,
        };
        let max_abs_residual = residuals[..checked].iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Self {
            fair: max_abs_residual <= tolerance,
            residuals,
            expected_payouts,
            max_abs_residual,
            mode,
            tolerance,
        }
    }

    /// Fairness for the participants alone.
    pub fn participants_fair(&self) -> bool {
        let n = self.residuals.len() - 1;
        self.residuals[..n].iter().all(|r| r.abs() <= self.tolerance)
    }
}

fn check_dims(inv: &InvestmentVector, exp: &ExpectationReport) -> Result<()> {
    if inv.amounts().len() != exp.means.len() {
        return Err(Error::DimensionMismatch {
            expected: inv.amounts().len(),
            found: exp.means.len(),
        });
    }
    Ok(())
}

/// Residuals `pi_i - (sum_j pi_j) E[P_i]` for all `n + 1` agents.
pub fn check_fair_active(inv: &InvestmentVector, exp: &ExpectationReport, tol: f64) -> Result<FairnessReport> {
    if inv.mode() != Mode::Active {
        return Err(Error::ModeMismatch {
            expected: Mode::Active,
            found: inv.mode(),
        });
    }
    check_dims(inv, exp)?;
    let total = inv.total();
    let expected: Vec<f64> = exp.means.iter().map(|&m| total * m).collect();
    let residuals = inv.amounts().iter().zip(&expected).map(|(pi, w)| pi - w).collect();
    Ok(FairnessReport::new(residuals, expected, Mode::Active, tol))
}

/// Residuals `pi_i - [(sum_{j<=n} pi_j) E[P_i] + pi_i E[P_{n+1}]]` for the
/// participants. The passive administrator is always fair.
pub fn check_fair_passive(inv: &InvestmentVector, exp: &ExpectationReport, tol: f64) -> Result<FairnessReport> {
    if inv.mode() != Mode::Passive {
        return Err(Error::ModeMismatch {
            expected: Mode::Passive,
            found: inv.mode(),
        });
    }
    check_dims(inv, exp)?;
    let refund = exp.admin_mean();
    if refund >= 1.0 {
        return Err(Error::DegenerateModel(refund));
    }
    let pool = inv.participants_total();
    let n = inv.participants();
    let mut expected: Vec<f64> = inv.participant_amounts()
        .iter()
        .zip(&exp.means[..n])
        .map(|(&pi, &m)| pool * m + pi * refund)
        .collect();
    expected.push(0.0);
    let residuals = inv.amounts().iter().zip(&expected).map(|(pi, w)| pi - w).collect();
    Ok(FairnessReport::new(residuals, expected, Mode::Passive, tol))
}

pub fn check_fair(inv: &InvestmentVector, exp: &ExpectationReport, tol: f64) -> Result<FairnessReport> {
    match inv.mode() {
        Mode::Active => check_fair_active(inv, exp, tol),
        Mode::Passive => check_fair_passive(inv, exp, tol),
    }
}

/// The external scale fixing a fair investment vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// Sum of all `n + 1` investments.
    TotalAll(f64),
    /// Sum of the participants' investments.
    ParticipantsTotal(f64),
    /// The administrator's investment.
    AdminInvestment(f64),
}

impl Anchor {
    pub fn value(&self) -> f64 {
        match *self {
            Anchor::TotalAll(v) | Anchor::ParticipantsTotal(v) | Anchor::AdminInvestment(v) => v,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.value();
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::NonPositiveAnchor(v))
        }
    }

    /// Rescales `amounts` (length `n + 1`) so that the anchored quantity hits
    /// its value.
    pub(crate) fn rescale(&self, amounts: &mut [f64]) -> Result<()> {
        let n = amounts.len() - 1;
        let current = match self {
            Anchor::TotalAll(_) => amounts.iter().sum(),
            Anchor::ParticipantsTotal(_) => amounts[..n].iter().sum(),
            Anchor::AdminInvestment(_) => amounts[n],
        };
        if current.is_nan() || current <= 0.0 {
            return Err(Error::AnchorInfeasible(format!(
                "{self:?}: anchored quantity is {current}"
            )));
        }
        let c = self.value() / current;
        amounts.iter_mut().for_each(|a| *a *= c);
        Ok(())
    }
}

/// Fair investments for a rule whose expected shares do not depend on the
/// investments.
///
/// Active: `TotalAll(S)` gives `S E[P_i]`, `ParticipantsTotal(T)` gives
/// `T E[P_i] / Pr[P_{n+1} = 0]` and `AdminInvestment(a)` gives
/// `a E[P_i] / Pr[P_{n+1} = 1]`. Passive accepts a participants' total (a
/// total-all anchor means the same thing, the administrator investing
/// nothing) and gives `T E[P_i] / Pr[P_{n+1} = 0]`.
pub fn solve_fair_linear(exp: &ExpectationReport, anchor: Anchor, mode: Mode) -> Result<InvestmentVector> {
    anchor.validate()?;
    let n = exp.participants();
    let admin_claim = exp.admin_mean();
    if admin_claim >= 1.0 {
        return Err(Error::DegenerateModel(admin_claim));
    }
    let none_claim = 1.0 - admin_claim;
    let factor = match (mode, anchor) {
        (Mode::Active, Anchor::TotalAll(s)) => s,
        (_, Anchor::ParticipantsTotal(t)) | (Mode::Passive, Anchor::TotalAll(t)) => t / none_claim,
        (Mode::Active, Anchor::AdminInvestment(a)) => {
            if admin_claim <= 0.0 {
                return Err(Error::AnchorInfeasible(
                    "administrator never claims, so a fair administrator cannot invest".into(),
                ));
            }
            a / admin_claim
        }
        (Mode::Passive, Anchor::AdminInvestment(_)) => {
            return Err(Error::AnchorInfeasible(
                "a passive administrator does not invest".into(),
            ))
        }
    };
    let mut amounts: Vec<f64> = exp.means.iter().map(|&m| factor * m).collect();
    if mode == Mode::Passive {
        amounts[n] = 0.0;
    }
    InvestmentVector::new(amounts, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Participants fair under the active administrator.
    pub active_participants_fair: bool,
    /// Participants fair under a passive administrator with the same
    /// participant investments.
    pub passive_participants_fair: bool,
    /// `pi_{n+1} = E[W^active_{n+1}]`.
    pub admin_fair: bool,
    /// Whether the two statements agree.
    pub equivalent: bool,
    pub active: FairnessReport,
    pub passive: FairnessReport,
}

/// Compares "participants fair with the active administrator" against
/// "participants fair with a passive administrator and the active
/// administrator's investment fair"; the two must agree.
pub fn active_passive_equivalence(
    inv_active: &InvestmentVector,
    exp: &ExpectationReport,
    tol: f64,
) -> Result<EquivalenceReport> {
    let active = check_fair_active(inv_active, exp, tol)?;
    let passive = check_fair_passive(&inv_active.to_passive(), exp, tol)?;
    let n = inv_active.participants();
    let admin_fair = active.residuals[n].abs() <= tol;
    let a = active.participants_fair();
    let b = passive.participants_fair() && admin_fair;
    Ok(EquivalenceReport {
        active_participants_fair: a,
        passive_participants_fair: passive.participants_fair(),
        admin_fair,
        equivalent: a == b,
        active,
        passive,
    })
}
