//! Closed forms for two participants and one administrator under the rule
//! that splits the pot `beta : 1 - beta` when both participants claim.

use super::Anchor;
use crate::error::{Error, Result};
use crate::scheme::{InvestmentVector, Mode};

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::DegenerateProbability(p))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::InfeasibleBeta(beta))
    }
}

/// `(E[P_1], E[P_2], E[P_3])` for claim probabilities `p1`, `p2`.
fn expected(p1: f64, p2: f64, beta: f64) -> [f64; 3] {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    [p1 * (q2 + beta * p2), p2 * (q1 + (1.0 - beta) * p1), q1 * q2]
}

/// Fair investments for the two-participant split rule.
///
/// Active scaling follows the anchor; passive mode accepts a participants'
/// total (or a total-all anchor, which means the same thing there).
pub fn two_participant_tontine_fair(
    p1: f64,
    p2: f64,
    beta: f64,
    anchor: Anchor,
    mode: Mode,
) -> Result<InvestmentVector> {
    check_prob(p1)?;
    check_prob(p2)?;
    check_beta(beta)?;
    anchor.validate()?;
    let e = expected(p1, p2, beta);
    let some_claim = 1.0 - e[2];
    let factor = match (mode, anchor) {
        (Mode::Active, Anchor::TotalAll(s)) => s,
        (_, Anchor::ParticipantsTotal(t)) | (Mode::Passive, Anchor::TotalAll(t)) => t / some_claim,
        (Mode::Active, Anchor::AdminInvestment(a)) => a / e[2],
        (Mode::Passive, Anchor::AdminInvestment(_)) => {
            return Err(Error::AnchorInfeasible(
                "a passive administrator does not invest".into(),
            ))
        }
    };
    let admin = match mode {
        Mode::Active => factor * e[2],
        Mode::Passive => 0.0,
    };
    InvestmentVector::new(vec![factor * e[0], factor * e[1], admin], mode)
}

/// Passive fair scheme given the first participant's investment.
pub fn two_participant_passive_from_first(p1: f64, p2: f64, beta: f64, pi1: f64) -> Result<InvestmentVector> {
    check_prob(p1)?;
    check_prob(p2)?;
    check_beta(beta)?;
    if !(pi1 > 0.0 && pi1.is_finite()) {
        return Err(Error::NonPositiveAnchor(pi1));
    }
    let e = expected(p1, p2, beta);
    InvestmentVector::passive(vec![pi1, pi1 * e[1] / e[0]])
}

/// Split fraction implied by units: `f1 / (f1 + f2)`.
pub fn beta_from_units(f1: f64, f2: f64) -> Result<f64> {
    if !(f1 > 0.0 && f1.is_finite()) {
        return Err(Error::NonPositiveUnit { index: 0, value: f1 });
    }
    if !(f2 > 0.0 && f2.is_finite()) {
        return Err(Error::NonPositiveUnit { index: 1, value: f2 });
    }
    Ok(f1 / (f1 + f2))
}

/// The split fraction making the participant investments `(pi1, pi2)` fair:
/// `beta = (pi1 (1 - q1 q2) / (pi1 + pi2) - p1 q2) / (p1 p2)`.
pub fn beta_for_fair_investments(p1: f64, p2: f64, pi1: f64, pi2: f64) -> Result<f64> {
    check_prob(p1)?;
    check_prob(p2)?;
    for (index, value) in [pi1, pi2].into_iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NegativeInvestment { index, value });
        }
    }
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let beta = (pi1 * (1.0 - q1 * q2) / (pi1 + pi2) - p1 * q2) / (p1 * p2);
    // rounding can push the boundary cases a hair outside [0, 1]
    let snapped = if beta.abs() < 1e-12 {
        0.0
    } else if (beta - 1.0).abs() < 1e-12 {
        1.0
    } else {
        beta
    };
    check_beta(snapped)?;
    Ok(snapped)
}
