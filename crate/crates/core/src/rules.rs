//! Relative-compensation rules: maps from a realised scenario to a
//! [`RelativeShareVector`].
//!
//! A [`Rule`] may read the investment vector (tontine units proportional to
//! investments); [`Rule::bind`] fixes the investments once per scheme and
//! yields a [`BoundRule`] that only depends on the scenario.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expectation::BernoulliModel;
use crate::scheme::{validate_shares, InvestmentVector, Mode, RelativeShareVector};

/// Non-negative losses of the `n` participants.
#[derive(Debug, Clone, PartialEq)]
pub struct LossScenario {
    losses: Vec<f64>,
}

impl LossScenario {
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        for (index, &value) in losses.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeLoss { index, value });
            }
        }
        Ok(Self { losses })
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }
}

/// Event indicators of the `n` participants (1 = the participant claims,
/// e.g. survives).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndicatorScenario {
    indicators: Vec<bool>,
}

impl IndicatorScenario {
    pub fn new(indicators: Vec<bool>) -> Self {
        Self { indicators }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .enumerate()
            .map(|(index, &value)| match value {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::NonBinaryIndicator { index, value }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn indicators(&self) -> &[bool] {
        &self.indicators
    }

    /// The administrator's indicator: 1 when nobody claims.
    pub fn admin_indicator(&self) -> bool {
        self.indicators.iter().all(|&i| !i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Losses(LossScenario),
    Indicators(IndicatorScenario),
}

impl Scenario {
    pub fn participants(&self) -> usize {
        match self {
            Scenario::Losses(l) => l.losses.len(),
            Scenario::Indicators(i) => i.indicators.len(),
        }
    }

    /// Loss view of the scenario; indicators read as 0/1 losses.
    pub fn loss_values(&self) -> Cow<'_, [f64]> {
        match self {
            Scenario::Losses(l) => Cow::Borrowed(&l.losses),
            Scenario::Indicators(i) => {
                Cow::Owned(i.indicators.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
            }
        }
    }
}

impl From<LossScenario> for Scenario {
    fn from(s: LossScenario) -> Self {
        Scenario::Losses(s)
    }
}

impl From<IndicatorScenario> for Scenario {
    fn from(s: IndicatorScenario) -> Self {
        Scenario::Indicators(s)
    }
}

/// How the tontine units `f_1..f_{n+1}` are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitStrategy {
    /// `f_i = pi_i / p_i`.
    InvestmentPerProbability,
    /// `f_i = pi_i`.
    Investment,
    /// `f_i = 1`.
    Uniform,
    /// `f_i = 1 / p_i`.
    InverseProbability,
    Explicit(Vec<f64>),
}

impl UnitStrategy {
    pub fn reads_investments(&self) -> bool {
        matches!(self, UnitStrategy::InvestmentPerProbability | UnitStrategy::Investment)
    }

    pub fn needs_probabilities(&self) -> bool {
        matches!(self, UnitStrategy::InvestmentPerProbability | UnitStrategy::InverseProbability)
    }
}

/// Resolves the units for a scheme.
///
/// The administrator's unit never changes any share (its indicator is 1 only
/// when every other indicator is 0), so for derived strategies a zero or
/// undefined administrator unit (passive administrator, certain survival of
/// some participant) is replaced by 1. Explicit units are taken as given.
pub fn resolve_units(
    strategy: &UnitStrategy,
    inv: &InvestmentVector,
    probs: Option<&BernoulliModel>,
) -> Result<Vec<f64>> {
    let n = inv.participants();
    if let Some(model) = probs {
        if model.participants() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: model.participants(),
            });
        }
    }
    let prob = |i: usize| -> Result<f64> {
        let model = probs.ok_or(Error::MissingProbabilities)?;
        let p = if i < n {
            model.probs()[i]
        } else {
            model.admin_claim_probability()
        };
        if p == 0.0 {
            Err(Error::ZeroProbability { index: i })
        } else {
            Ok(p)
        }
    };
    let pi = inv.amounts();
    let mut units = Vec::with_capacity(n + 1);
    match strategy {
        UnitStrategy::Explicit(f) => {
            if f.len() != n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: n + 1,
                    found: f.len(),
                });
            }
            units.extend_from_slice(f);
        }
        UnitStrategy::Uniform => units.resize(n + 1, 1.0),
        UnitStrategy::Investment => units.extend_from_slice(pi),
        UnitStrategy::InvestmentPerProbability => {
            for (i, &amount) in pi[..n].iter().enumerate() {
                units.push(amount / prob(i)?);
            }
            units.push(prob(n).map(|p| pi[n] / p).unwrap_or(0.0));
        }
        UnitStrategy::InverseProbability => {
            for i in 0..n {
                units.push(1.0 / prob(i)?);
            }
            units.push(prob(n).map(|p| 1.0 / p).unwrap_or(0.0));
        }
    }
    if !matches!(strategy, UnitStrategy::Explicit(_)) && !(units[n] > 0.0 && units[n].is_finite()) {
        units[n] = 1.0;
    }
    check_units(&units)?;
    Ok(units)
}

fn check_units(units: &[f64]) -> Result<()> {
    for (index, &value) in units.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveUnit { index, value });
        }
    }
    Ok(())
}

/// `P_i = X_i / sum_j X_j`, with `X_{n+1} = 1` when nobody has a loss.
pub fn proportional_rule(scenario: &LossScenario) -> RelativeShareVector {
    shares_from_weights(scenario.losses().iter().copied(), scenario.losses().len())
}

/// `P_i = f_i I_i / sum_j f_j I_j`, with `I_{n+1} = prod_j (1 - I_j)`.
pub fn tontine_rule(units: &[f64], scenario: &IndicatorScenario) -> Result<RelativeShareVector> {
    let n = scenario.indicators.len();
    if units.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: units.len(),
        });
    }
    check_units(units)?;
    Ok(tontine_shares(units, &scenario.indicators))
}

fn tontine_shares(units: &[f64], indicators: &[bool]) -> RelativeShareVector {
    let weights = units.iter().zip(indicators).map(|(&f, &i)| if i { f } else { 0.0 });
    shares_from_weights(weights, indicators.len())
}

/// Shares proportional to non-negative participant weights, falling back to
/// the administrator when every weight is zero.
fn shares_from_weights(weights: impl Iterator<Item = f64> + Clone, n: usize) -> RelativeShareVector {
    let total: f64 = weights.clone().sum();
    let mut shares = Vec::with_capacity(n + 1);
    if total == 0.0 {
        shares.resize(n, 0.0);
        shares.push(1.0);
    } else {
        shares.extend(weights.map(|w| w / total));
        shares.push(0.0);
    }
    RelativeShareVector::new_unchecked(shares)
}

/// Participant `i` receives the share of the `i`-th smallest loss.
///
/// Ties are broken by a stable ascending sort, so the result does not depend
/// on how equal losses are ordered in the input.
pub fn order_statistic_rule(scenario: &LossScenario) -> RelativeShareVector {
    let mut sorted = scenario.losses.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    shares_from_weights(sorted.into_iter(), n)
}

type ShareMap = dyn Fn(&Scenario) -> Result<Vec<f64>> + Send + Sync;

/// A user-supplied share map. The map must be free of side effects; it is
/// evaluated concurrently by the Monte Carlo engines.
#[derive(Clone)]
pub struct CustomRule {
    name: String,
    map: Arc<ShareMap>,
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule").field("name", &self.name).finish()
    }
}

impl CustomRule {
    pub fn new<F>(name: impl Into<String>, map: F) -> Self
    where
        F: Fn(&Scenario) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            map: Arc::new(map),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Lookup table keyed by indicator pattern. Patterns not in the table are
    /// a [`Error::RuleScenarioMismatch`] at evaluation time.
    pub fn from_table(entries: Vec<(IndicatorScenario, Vec<f64>)>) -> Self {
        let table: HashMap<Vec<bool>, Vec<f64>> = entries
            .into_iter()
            .map(|(k, v)| (k.indicators, v))
            .collect();
        Self::new("table", move |scenario| match scenario {
            Scenario::Indicators(s) => table.get(&s.indicators).cloned().ok_or_else(|| {
                Error::RuleScenarioMismatch(format!("no table entry for {:?}", s.indicators))
            }),
            Scenario::Losses(_) => Err(Error::RuleScenarioMismatch(
                "table rules take indicator scenarios".into(),
            )),
        })
    }

    /// The two-participant tontine split: a sole survivor takes all, two
    /// survivors split `beta : 1 - beta`, the administrator takes all when
    /// both die.
    pub fn two_participant_beta(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InfeasibleBeta(beta));
        }
        Ok(Self::new(format!("beta={beta}"), move |scenario| {
            let i = match scenario {
                Scenario::Indicators(s) if s.indicators.len() == 2 => &s.indicators,
                _ => {
                    return Err(Error::RuleScenarioMismatch(
                        "beta rule takes two indicators".into(),
                    ))
                }
            };
            Ok(match (i[0], i[1]) {
                (true, false) => vec![1.0, 0.0, 0.0],
                (false, true) => vec![0.0, 1.0, 0.0],
                (false, false) => vec![0.0, 0.0, 1.0],
                (true, true) => vec![beta, 1.0 - beta, 0.0],
            })
        }))
    }
}

/// Applies a custom map and enforces membership of the result.
pub fn custom_rule_validate(rule: &CustomRule, scenario: &Scenario) -> Result<RelativeShareVector> {
    (rule.map)(scenario)
        .and_then(|shares| {
            if shares.len() != scenario.participants() + 1 {
                return Err(Error::DimensionMismatch {
                    expected: scenario.participants() + 1,
                    found: shares.len(),
                });
            }
            validate_shares(&shares)
        })
        .map_err(|e| e.in_scenario(scenario))
}

#[derive(Debug, Clone)]
pub enum Rule {
    ProportionalLoss,
    TontineUnits {
        strategy: UnitStrategy,
        probs: Option<BernoulliModel>,
    },
    OrderStatistic,
    Custom(CustomRule),
}

impl Rule {
    pub fn uniform_tontine() -> Self {
        Rule::TontineUnits {
            strategy: UnitStrategy::Uniform,
            probs: None,
        }
    }

    pub fn investment_units() -> Self {
        Rule::TontineUnits {
            strategy: UnitStrategy::Investment,
            probs: None,
        }
    }

    /// Whether the shares depend on the investment vector at all.
    pub fn reads_investments(&self) -> bool {
        matches!(self, Rule::TontineUnits { strategy, .. } if strategy.reads_investments())
    }

    /// Fixes the investment-dependent parts of the rule for one scheme.
    pub fn bind(&self, inv: &InvestmentVector) -> Result<BoundRule> {
        Ok(match self {
            Rule::ProportionalLoss => BoundRule::ProportionalLoss,
            Rule::OrderStatistic => BoundRule::OrderStatistic,
            Rule::Custom(c) => BoundRule::Custom(c.clone()),
            Rule::TontineUnits { strategy, probs } => BoundRule::Tontine {
                units: resolve_units(strategy, inv, probs.as_ref())?,
            },
        })
    }

    /// Binds a rule that does not read investments. Rules that do need
    /// [`Rule::bind`].
    pub fn bind_fixed(&self, participants: usize) -> Result<BoundRule> {
        if self.reads_investments() {
            return Err(Error::RuleScenarioMismatch(
                "rule reads the investment vector; bind it to a scheme".into(),
            ));
        }
        let mut amounts = vec![1.0; participants];
        amounts.push(0.0);
        self.bind(&InvestmentVector::new(amounts, Mode::Passive)?)
    }
}

/// A rule with its investment-dependent parameters fixed.
#[derive(Debug, Clone)]
pub enum BoundRule {
    ProportionalLoss,
    Tontine { units: Vec<f64> },
    OrderStatistic,
    Custom(CustomRule),
}

impl BoundRule {
    pub fn evaluate(&self, scenario: &Scenario) -> Result<RelativeShareVector> {
        match self {
            BoundRule::ProportionalLoss => {
                Ok(proportional_rule(&LossScenario::new(scenario.loss_values().into_owned())?))
            }
            BoundRule::OrderStatistic => {
                Ok(order_statistic_rule(&LossScenario::new(scenario.loss_values().into_owned())?))
            }
            BoundRule::Tontine { units } => match scenario {
                Scenario::Indicators(s) => tontine_rule(units, s),
                Scenario::Losses(_) => Err(Error::RuleScenarioMismatch(
                    "tontine rules take indicator scenarios".into(),
                )),
            },
            BoundRule::Custom(c) => custom_rule_validate(c, scenario),
        }
    }

    /// Fast path for indicator outcomes.
    pub fn evaluate_indicators(&self, indicators: &[bool]) -> Result<RelativeShareVector> {
        match self {
            BoundRule::Tontine { units } if units.len() == indicators.len() + 1 => {
                Ok(tontine_shares(units, indicators))
            }
            _ => self.evaluate(&Scenario::Indicators(IndicatorScenario::new(indicators.to_vec()))),
        }
    }
}
