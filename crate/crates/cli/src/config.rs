//! Scenario file schema. One JSON document per scenario; unknown keys are
//! rejected and numbers may be written as exact fractions like `"1/6"`.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use poolshare::expectation::MethodChoice;
use poolshare::fairness::Anchor;
use poolshare::{Mode, UnitStrategy};

/// A real number given as a JSON number or as a string holding a decimal or
/// an integer fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn parse(s: &str) -> Result<f64, String> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: i64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            const EXACT: i64 = 1 << 53;
            if num.abs() > EXACT || den.abs() > EXACT {
                return Err(format!("fraction {s:?} is not exactly representable"));
            }
            // both operands are exact, so this is the correctly rounded quotient
            Ok(num as f64 / den as f64)
        } else {
            let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("not a finite number: {s:?}"))
            }
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a fraction string like \"1/6\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                Num::parse(v).map(Num).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

pub fn values(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitConfig {
    Uniform,
    InvestmentPerProbability,
    Investment,
    InverseProbability,
    Explicit(Vec<Num>),
}

impl UnitConfig {
    pub fn strategy(&self) -> UnitStrategy {
        match self {
            UnitConfig::Uniform => UnitStrategy::Uniform,
            UnitConfig::InvestmentPerProbability => UnitStrategy::InvestmentPerProbability,
            UnitConfig::Investment => UnitStrategy::Investment,
            UnitConfig::InverseProbability => UnitStrategy::InverseProbability,
            UnitConfig::Explicit(u) => UnitStrategy::Explicit(values(u)),
        }
    }
}

fn default_units() -> UnitConfig {
    UnitConfig::Uniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    /// 0/1 claim indicators of the participants.
    pub indicators: Vec<u8>,
    /// Shares for all `n + 1` agents.
    pub shares: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleConfig {
    Tontine {
        #[serde(default = "default_units")]
        units: UnitConfig,
    },
    // empty struct variants so that unknown keys are rejected
    Proportional {},
    OrderStatistic {},
    /// Two participants; the pot is split `beta : 1 - beta` when both claim.
    Beta { beta: Num },
    Custom { table: Vec<TableEntry> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Bernoulli {
        probs: Vec<Num>,
    },
    Homogeneous {
        n: usize,
        p: Num,
    },
    /// A fixed scenario: either losses or 0/1 indicators.
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        losses: Option<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        indicators: Option<Vec<u8>>,
    },
    ZeroInflatedExponential {
        zero_prob: Vec<Num>,
        mean: Vec<Num>,
    },
    ZeroInflatedLognormal {
        zero_prob: Vec<Num>,
        mu: Vec<Num>,
        sigma: Vec<Num>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_sizes: Option<Vec<usize>>,
    /// Absolute residual tolerance for fairness checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Num>,
    /// Relative convergence tolerance of the fixed-point solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_tolerance: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u64>,
    /// Claim probability for convergence experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Num>,
    /// Participant investment for convergence experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    /// All `n + 1` investments, or (passive only) the `n` participant ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub investments: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Anchor>,
    #[serde(default)]
    pub run: RunConfig,
}

fn default_mode() -> Mode {
    Mode::Active
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}
