use super::{ExpectationReport, LossSampler, Method};
use crate::error::{Error, Result};
use crate::rules::BoundRule;
use crate::stats::{run_chunked, Moments, DEFAULT_CHUNK_SIZE, GENERATOR_ID};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSettings {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    pub chunk_size: u64,
}

impl MonteCarloSettings {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            workers: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

/// Sample means and standard errors of `P_i` over independent draws.
///
/// Each chunk of `chunk_size` draws uses its own ChaCha stream derived from
/// the seed and the chunk index; chunk moments are merged in chunk order.
pub fn expected_shares_monte_carlo(
    rule: &BoundRule,
    sampler: &LossSampler,
    settings: &MonteCarloSettings,
) -> Result<ExpectationReport> {
    if settings.samples < 2 {
        return Err(Error::InsufficientSamples {
            got: settings.samples as usize,
            min: 2,
        });
    }
    sampler.validate()?;
    let agents = sampler.participants() + 1;
    let chunks = run_chunked(
        settings.samples,
        settings.chunk_size,
        settings.seed,
        settings.workers,
        |_, _, len, rng| {
            let mut moments = vec![Moments::default(); agents];
            for _ in 0..len {
                let scenario = sampler.sample(rng);
                let shares = rule.evaluate(&scenario)?;
                if shares.len() != agents {
                    return Err(Error::DimensionMismatch {
                        expected: agents,
                        found: shares.len(),
                    });
                }
                for (m, &s) in moments.iter_mut().zip(shares.shares()) {
                    m.push(s);
                }
            }
            Ok(moments)
        },
    )?;
    let mut total = vec![Moments::default(); agents];
    for chunk in &chunks {
        for (t, m) in total.iter_mut().zip(chunk) {
            t.merge(m);
        }
    }
    Ok(ExpectationReport {
        means: total.iter().map(|m| m.mean).collect(),
        method: Method::MonteCarlo,
        stderr: Some(total.iter().map(Moments::std_error).collect()),
        samples: Some(settings.samples),
        seed: Some(settings.seed),
        generator: Some(GENERATOR_ID.to_string()),
        chunk_size: Some(settings.chunk_size),
    })
}
