use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal};

use super::BernoulliModel;
use crate::error::{Error, Result};
use crate::rules::{IndicatorScenario, LossScenario, Scenario};
use crate::stats::{chunk_rng, SimRng};

type DrawFn = dyn Fn(&mut SimRng) -> Scenario + Send + Sync;

/// Joint distribution of the participants' scenario at time 1.
#[derive(Clone)]
pub enum LossSampler {
    /// Always the same scenario.
    Constant(Scenario),
    /// Independent survival indicators.
    Bernoulli(BernoulliModel),
    /// Independent losses: zero with probability `zero_prob[i]`, otherwise
    /// exponential with mean `mean[i]`.
    ZeroInflatedExponential { zero_prob: Vec<f64>, mean: Vec<f64> },
    /// Independent losses: zero with probability `zero_prob[i]`, otherwise
    /// lognormal with log-mean `mu[i]` and log-sd `sigma[i]`.
    ZeroInflatedLognormal {
        zero_prob: Vec<f64>,
        mu: Vec<f64>,
        sigma: Vec<f64>,
    },
    /// Arbitrary joint law. The closure must be a pure function of the
    /// generator state.
    Custom {
        participants: usize,
        draw: Arc<DrawFn>,
    },
}

impl fmt::Debug for LossSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossSampler::Constant(s) => f.debug_tuple("Constant").field(s).finish(),
            LossSampler::Bernoulli(m) => f.debug_tuple("Bernoulli").field(m).finish(),
            LossSampler::ZeroInflatedExponential { zero_prob, mean } => f
                .debug_struct("ZeroInflatedExponential")
                .field("zero_prob", zero_prob)
                .field("mean", mean)
                .finish(),
            LossSampler::ZeroInflatedLognormal { zero_prob, mu, sigma } => f
                .debug_struct("ZeroInflatedLognormal")
                .field("zero_prob", zero_prob)
                .field("mu", mu)
                .field("sigma", sigma)
                .finish(),
            LossSampler::Custom { participants, .. } => f
                .debug_struct("Custom")
                .field("participants", participants)
                .finish_non_exhaustive(),
        }
    }
}

impl LossSampler {
    pub fn custom<F>(participants: usize, draw: F) -> Self
    where
        F: Fn(&mut SimRng) -> Scenario + Send + Sync + 'static,
    {
        LossSampler::Custom {
            participants,
            draw: Arc::new(draw),
        }
    }

    pub fn participants(&self) -> usize {
        match self {
            LossSampler::Constant(s) => s.participants(),
            LossSampler::Bernoulli(m) => m.participants(),
            LossSampler::ZeroInflatedExponential { zero_prob, .. } => zero_prob.len(),
            LossSampler::ZeroInflatedLognormal { zero_prob, .. } => zero_prob.len(),
            LossSampler::Custom { participants, .. } => *participants,
        }
    }

    /// Parameter checks; run once before sampling.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidDistribution(what.to_string()));
        match self {
            LossSampler::ZeroInflatedExponential { zero_prob, mean } => {
                super::pmf::check_probs(zero_prob)?;
                if mean.len() != zero_prob.len() {
                    return bad("mean and zero_prob lengths differ");
                }
                if mean.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
                    return bad("exponential means must be positive");
                }
            }
            LossSampler::ZeroInflatedLognormal { zero_prob, mu, sigma } => {
                super::pmf::check_probs(zero_prob)?;
                if mu.len() != zero_prob.len() || sigma.len() != zero_prob.len() {
                    return bad("mu, sigma and zero_prob lengths differ");
                }
                if mu.iter().any(|m| !m.is_finite()) || sigma.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
                    return bad("lognormal parameters must be finite with sigma >= 0");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// One draw. Parameters must have passed [`LossSampler::validate`].
    pub fn sample(&self, rng: &mut SimRng) -> Scenario {
        match self {
            LossSampler::Constant(s) => s.clone(),
            LossSampler::Bernoulli(m) => Scenario::Indicators(IndicatorScenario::new(
                m.probs().iter().map(|&p| rng.random::<f64>() < p).collect(),
            )),
            LossSampler::ZeroInflatedExponential { zero_prob, mean } => {
                let losses = zero_prob
                    .iter()
                    .zip(mean)
                    .map(|(&z, &m)| {
                        let positive = rng.random::<f64>() >= z;
                        let x = Exp::new(1.0 / m).expect("validated").sample(rng);
                        if positive {
                            x
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Scenario::Losses(LossScenario::new(losses).expect("exponential draws are non-negative"))
            }
            LossSampler::ZeroInflatedLognormal { zero_prob, mu, sigma } => {
                let losses = zero_prob
                    .iter()
                    .zip(mu.iter().zip(sigma))
                    .map(|(&z, (&m, &s))| {
                        let positive = rng.random::<f64>() >= z;
                        let x = LogNormal::new(m, s).expect("validated").sample(rng);
                        if positive {
                            x
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Scenario::Losses(LossScenario::new(losses).expect("lognormal draws are non-negative"))
            }
            LossSampler::Custom { draw, .. } => draw(rng),
        }
    }

    /// Endless stream of draws from a fresh generator. Identical seeds give
    /// identical sequences.
    pub fn draws(&self, seed: u64) -> impl Iterator<Item = Scenario> + '_ {
        let mut rng = chunk_rng(seed, 0);
        std::iter::repeat_with(move || self.sample(&mut rng))
    }
}
