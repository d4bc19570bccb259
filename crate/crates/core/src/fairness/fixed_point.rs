use serde::Serialize;

use super::{check_fair_active, Anchor, FairnessReport};
use crate::error::{Error, Result};
use crate::expectation::{expected_shares_enumeration, BernoulliModel, ExpectationReport};
use crate::rules::Rule;
use crate::scheme::InvestmentVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Stop once no component of an iterate changes by more than this
    /// fraction of itself.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Weight on the new iterate, in `(0, 1]`.
    pub damping: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
            damping: 0.5,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidSettings(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidSettings("max_iterations must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidSettings(format!("damping {} must lie in (0, 1]", self.damping)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointSolution {
    pub investments: InvestmentVector,
    pub expectations: ExpectationReport,
    pub report: FairnessReport,
    pub iterations: usize,
    pub last_change: f64,
    /// Spread `max - min` over agents of `E[W_i] / pi_i`; zero at a fair
    /// point.
    pub payout_ratio_spread: f64,
}

/// Fair active investments for a rule whose shares may depend on the
/// investments, by damped iteration of `pi <- (sum pi) E[P(pi)]` with exact
/// expectations, rescaled to the anchor after every step.
pub fn solve_fair_fixed_point(
    rule: &Rule,
    model: &BernoulliModel,
    anchor: Anchor,
    settings: &SolverSettings,
) -> Result<FixedPointSolution> {
    settings.validate()?;
    anchor.validate()?;
    let admin_claim = model.admin_claim_probability();
    if model.is_degenerate() {
        return Err(Error::DegenerateModel(admin_claim));
    }
    let rule = with_model(rule, model);
    let n = model.participants();
    let expectations_at = |amounts: &[f64]| -> Result<ExpectationReport> {
        let inv = InvestmentVector::active(amounts.to_vec())?;
        expected_shares_enumeration(&rule.bind(&inv)?, model)
    };

    let mut pi = vec![1.0; n + 1];
    let first = expectations_at(&pi)?;
    let a = first.admin_mean();
    if a <= 0.0 || a >= 1.0 {
        return Err(Error::DegenerateModel(a));
    }
    pi[n] = n as f64 * a / (1.0 - a);
    anchor.rescale(&mut pi)?;

    let d = settings.damping;
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < settings.max_iterations {
        iterations += 1;
        let exp = expectations_at(&pi)?;
        let total: f64 = pi.iter().sum();
        let mut next: Vec<f64> = pi
            .iter()
            .zip(&exp.means)
            .map(|(&p, &m)| (1.0 - d) * p + d * total * m)
            .collect();
        anchor.rescale(&mut next)?;
        // relative per component, so small investments converge as tightly as large ones
        last_change = pi
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / y.abs()));
        pi = next;
        if last_change <= settings.tolerance {
            break;
        }
    }

    let expectations = expectations_at(&pi)?;
    let investments = InvestmentVector::active(pi)?;
    let verify_tol = 10.0 * settings.tolerance * investments.total();
    let report = check_fair_active(&investments, &expectations, verify_tol)?;
    if last_change > settings.tolerance || !report.fair {
        return Err(Error::NoConvergence {
            iterations,
            last_change,
            max_residual: report.max_abs_residual,
        });
    }
    let ratios: Vec<f64> = report
        .expected_payouts
        .iter()
        .zip(investments.amounts())
        .map(|(w, p)| w / p)
        .collect();
    let payout_ratio_spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(FixedPointSolution {
        investments,
        expectations,
        report,
        iterations,
        last_change,
        payout_ratio_spread,
    })
}

/// Supplies the model's probabilities to unit strategies that need them.
fn with_model(rule: &Rule, model: &BernoulliModel) -> Rule {
    match rule {
        Rule::TontineUnits { strategy, probs: None } if strategy.needs_probabilities() => Rule::TontineUnits {
            strategy: strategy.clone(),
            probs: Some(model.clone()),
        },
        other => other.clone(),
    }
}
