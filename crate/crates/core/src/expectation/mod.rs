//! Expected relative shares `E[P_i]` for every agent.
//!
//! Three exact routes for independent indicators (full enumeration, the
//! joint-count form and the Poisson-binomial form), closed forms for the
//! homogeneous pool, and a seeded Monte Carlo estimator for arbitrary
//! samplers.

mod monte_carlo;
mod pmf;
mod sampler;

pub use monte_carlo::{expected_shares_monte_carlo, MonteCarloSettings};
pub use pmf::poisson_binomial_pmf;
pub use sampler::LossSampler;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::BoundRule;
use crate::stats::compensated_sum;

/// Largest pool handled by exact enumeration (2^25 outcomes).
pub const MAX_ENUMERATION_PARTICIPANTS: usize = 25;

/// Tolerance on `sum(means) == 1` for exact reports.
pub const EXACT_SUM_TOL: f64 = 1e-10;

/// Independent event indicators with `Pr[I_i = 1] = p_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliModel {
    probs: Vec<f64>,
}

impl BernoulliModel {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        pmf::check_probs(&probs)?;
        Ok(Self { probs })
    }

    pub fn homogeneous(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn participants(&self) -> usize {
        self.probs.len()
    }

    /// `Pr[I_{n+1} = 1] = prod_i q_i`: nobody claims.
    pub fn admin_claim_probability(&self) -> f64 {
        self.probs.iter().map(|p| 1.0 - p).product()
    }

    /// True when the administrator's event is certain or impossible, which
    /// rules out fairness solving.
    pub fn is_degenerate(&self) -> bool {
        let a = self.admin_claim_probability();
        a == 0.0 || a == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    ClosedForm,
    MonteCarlo,
    /// Supplied by the caller.
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub means: Vec<f64>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u64>,
}

impl ExpectationReport {
    fn exact(means: Vec<f64>, method: Method) -> Self {
        Self {
            means,
            method,
            stderr: None,
            samples: None,
            seed: None,
            generator: None,
            chunk_size: None,
        }
    }

    /// Wraps externally computed expectations after checking that they lie
    /// in `[0, 1]` and sum to one.
    pub fn given(means: Vec<f64>) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::TooFewAgents(means.len()));
        }
        for (index, &value) in means.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ProbOutOfRange { index, value });
            }
        }
        let sum: f64 = means.iter().sum();
        if (sum - 1.0).abs() > EXACT_SUM_TOL {
            return Err(Error::SumNotOne(sum));
        }
        Ok(Self::exact(means, Method::Given))
    }

    pub fn participants(&self) -> usize {
        self.means.len() - 1
    }

    /// `E[P_{n+1}] = Pr[P_{n+1} = 1]`.
    pub fn admin_mean(&self) -> f64 {
        self.means[self.means.len() - 1]
    }

    pub fn is_degenerate(&self) -> bool {
        let a = self.admin_mean();
        a <= 0.0 || a >= 1.0
    }
}

/// Exact `E[P_i]` by summing over all `2^n` indicator outcomes of an
/// independent model.
///
/// Outcomes are processed in fixed blocks whose partial sums are merged in
/// block order, so the result is bit-identical for any thread count.
pub fn expected_shares_enumeration(rule: &BoundRule, model: &BernoulliModel) -> Result<ExpectationReport> {
    let n = model.participants();
    if n > MAX_ENUMERATION_PARTICIPANTS {
        return Err(Error::TooManyParticipants {
            n,
            max: MAX_ENUMERATION_PARTICIPANTS,
        });
    }
    const BLOCK_BITS: usize = 14;
    let low = n.min(BLOCK_BITS);
    let blocks = 1u64 << (n - low);
    let block_len = 1u64 << low;
    let probs = model.probs();

    let partial = |block: u64| -> Result<Vec<(f64, f64)>> {
        // Neumaier (sum, compensation) per agent
        let mut acc = vec![(0.0f64, 0.0f64); n + 1];
        let mut indicators = vec![false; n];
        for offset in 0..block_len {
            let mask = (block << low) | offset;
            let mut pr = 1.0;
            for (j, (slot, &p)) in indicators.iter_mut().zip(probs).enumerate() {
                *slot = mask >> j & 1 == 1;
                pr *= if *slot { p } else { 1.0 - p };
            }
            if pr == 0.0 {
                continue;
            }
            let shares = rule.evaluate_indicators(&indicators)?;
            if shares.len() != n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: n + 1,
                    found: shares.len(),
                });
            }
            for (a, &s) in acc.iter_mut().zip(shares.shares()) {
                neumaier_add(a, pr * s);
            }
        }
        Ok(acc)
    };

    let blocks: Vec<Vec<(f64, f64)>> = if blocks > 1 {
        (0..blocks).into_par_iter().map(partial).collect::<Result<_>>()?
    } else {
        vec![partial(0)?]
    };
    let means = (0..=n)
        .map(|i| compensated_sum(blocks.iter().flat_map(|b| [b[i].0, b[i].1])))
        .collect();
    Ok(ExpectationReport::exact(means, Method::Enumeration))
}

fn neumaier_add(acc: &mut (f64, f64), v: f64) {
    let (sum, c) = acc;
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *c += (*sum - t) + v;
    } else {
        *c += (v - t) + *sum;
    }
    *sum = t;
}

fn check_index(model: &BernoulliModel, i: usize) -> Result<()> {
    if i >= model.participants() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: model.participants(),
        });
    }
    Ok(())
}

/// `E[P_i]` under uniform units: `p_i * sum_k Pr[others claiming = k-1] / k`,
/// with the distribution of the other claimants from the Poisson-binomial
/// recursion. `i` is zero-based.
pub fn expected_share_uniform_units(model: &BernoulliModel, i: usize) -> Result<f64> {
    check_index(model, i)?;
    let probs = model.probs();
    let others: Vec<f64> = probs[..i].iter().chain(&probs[i + 1..]).copied().collect();
    let pmf = poisson_binomial_pmf(&others)?;
    let s = compensated_sum(pmf.iter().enumerate().map(|(k, &pr)| pr / (k + 1) as f64));
    Ok(probs[i] * s)
}

/// `E[P_i]` under uniform units from the joint law of `(I_i, sum_j I_j)`:
/// `sum_k Pr[I_i = 1, sum_j I_j = k] / k`. `i` is zero-based.
pub fn expected_share_joint_counts(model: &BernoulliModel, i: usize) -> Result<f64> {
    check_index(model, i)?;
    // joint[k] = Pr[I_i = 1, sum of the indicators processed so far = k],
    // built in participant order; at participant i only the I_i = 1 branch
    // is kept.
    let mut joint = vec![1.0];
    for (j, &p) in model.probs().iter().enumerate() {
        if j == i {
            let mut shifted = vec![0.0; joint.len() + 1];
            for (k, &v) in joint.iter().enumerate() {
                shifted[k + 1] = v * p;
            }
            joint = shifted;
        } else {
            pmf::convolve_in_place(&mut joint, p);
        }
    }
    Ok(compensated_sum(
        joint.iter().enumerate().skip(1).map(|(k, &pr)| pr / k as f64),
    ))
}

/// All `n + 1` uniform-unit expectations from the Poisson-binomial form, with
/// `E[P_{n+1}] = prod_i q_i`.
pub fn expected_shares_closed_form(model: &BernoulliModel) -> Result<ExpectationReport> {
    let n = model.participants();
    let mut means = (0..n)
        .map(|i| expected_share_uniform_units(model, i))
        .collect::<Result<Vec<_>>>()?;
    means.push(model.admin_claim_probability());
    Ok(ExpectationReport::exact(means, Method::ClosedForm))
}

/// Homogeneous uniform-unit pool: `((1 - q^n) / n, q^n)` for a participant
/// and the administrator.
pub fn homogeneous_expected_shares(n: usize, q: f64) -> Result<(f64, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::DegenerateProbability(q));
    }
    if n == 0 {
        return Err(Error::TooFewAgents(1));
    }
    let admin = q.powi(n as i32);
    Ok(((1.0 - admin) / n as f64, admin))
}

/// How [`expected_shares`] computes expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Enumeration up to [`MAX_ENUMERATION_PARTICIPANTS`], then the closed
    /// form when the rule has equal participant units, else Monte Carlo.
    #[default]
    Auto,
    Enumeration,
    ClosedForm,
    MonteCarlo,
}

fn has_equal_participant_units(rule: &BoundRule) -> bool {
    match rule {
        BoundRule::Tontine { units } => {
            let n = units.len() - 1;
            units[..n].iter().all(|&u| u == units[0])
        }
        _ => false,
    }
}

/// Expected shares of a bound rule under independent indicators.
pub fn expected_shares(
    rule: &BoundRule,
    model: &BernoulliModel,
    choice: MethodChoice,
    mc: &MonteCarloSettings,
) -> Result<ExpectationReport> {
    let closed_form_ok = has_equal_participant_units(rule);
    match choice {
        MethodChoice::Enumeration => expected_shares_enumeration(rule, model),
        MethodChoice::ClosedForm if closed_form_ok => expected_shares_closed_form(model),
        MethodChoice::ClosedForm => Err(Error::RuleScenarioMismatch(
            "the closed form needs a tontine rule with equal participant units".into(),
        )),
        MethodChoice::MonteCarlo => {
            expected_shares_monte_carlo(rule, &LossSampler::Bernoulli(model.clone()), mc)
        }
        MethodChoice::Auto if model.participants() <= MAX_ENUMERATION_PARTICIPANTS => {
            expected_shares_enumeration(rule, model)
        }
        MethodChoice::Auto if closed_form_ok => expected_shares_closed_form(model),
        MethodChoice::Auto => expected_shares_monte_carlo(rule, &LossSampler::Bernoulli(model.clone()), mc),
    }
}
