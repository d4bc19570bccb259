//! Pathwise payouts: audited simulation of a scheme, the active/passive
//! comparison and the convergence of homogeneous pools to centralized
//! insurance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectation::{expected_shares, BernoulliModel, LossSampler, Method, MethodChoice, MonteCarloSettings};
use crate::rules::{BoundRule, Rule};
use crate::scheme::{payouts, InvestmentVector, Mode};
use crate::stats::{run_chunked, Moments, DEFAULT_CHUNK_SIZE, GENERATOR_ID};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    pub paths: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    pub chunk_size: u64,
    /// Check full allocation and mutual exclusivity on every path.
    pub audit: bool,
}

impl SimulationSettings {
    pub fn new(paths: u64, seed: u64) -> Self {
        Self {
            paths,
            seed,
            workers: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
            audit: true,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStats {
    pub mean_payouts: Vec<f64>,
    pub std_payouts: Vec<f64>,
    /// Standard errors of the mean payouts.
    pub stderr_payouts: Vec<f64>,
    pub admin_takes_all: u64,
    pub n_paths: u64,
    pub seed: u64,
    pub allocation_violations: u64,
    pub exclusivity_violations: u64,
    pub audited: bool,
    pub generator: String,
    pub chunk_size: u64,
}

#[derive(Clone)]
struct PathChunk {
    payouts: Vec<Moments>,
    admin_takes_all: u64,
    allocation_violations: u64,
    exclusivity_violations: u64,
}

/// Draws `paths` scenarios, applies the rule and the payout formula of the
/// scheme's mode, and aggregates per-agent payout statistics.
pub fn simulate_payouts(
    inv: &InvestmentVector,
    rule: &BoundRule,
    sampler: &LossSampler,
    settings: &SimulationSettings,
) -> Result<PathStats> {
    if settings.paths == 0 {
        return Err(Error::InsufficientSamples { got: 0, min: 1 });
    }
    if sampler.participants() != inv.participants() {
        return Err(Error::DimensionMismatch {
            expected: inv.participants(),
            found: sampler.participants(),
        });
    }
    sampler.validate()?;
    let agents = inv.amounts().len();
    let chunks = run_chunked(
        settings.paths,
        settings.chunk_size,
        settings.seed,
        settings.workers,
        |_, start, len, rng| {
            let mut out = PathChunk {
                payouts: vec![Moments::default(); agents],
                admin_takes_all: 0,
                allocation_violations: 0,
                exclusivity_violations: 0,
            };
            for k in 0..len {
                let scenario = sampler.sample(rng);
                let shares = rule.evaluate(&scenario).map_err(|e| e.on_path(start + k))?;
                let w = payouts(inv, &shares).map_err(|e| e.on_path(start + k))?;
                out.admin_takes_all += shares.admin_takes_all() as u64;
                if settings.audit {
                    out.allocation_violations += !w.fully_allocated(inv) as u64;
                    out.exclusivity_violations += !w.mutually_exclusive() as u64;
                }
                for (m, &x) in out.payouts.iter_mut().zip(w.payouts()) {
                    m.push(x);
                }
            }
            Ok(out)
        },
    )?;
    let mut payouts_m = vec![Moments::default(); agents];
    let (mut takes_all, mut alloc, mut excl) = (0, 0, 0);
    for c in &chunks {
        for (t, m) in payouts_m.iter_mut().zip(&c.payouts) {
            t.merge(m);
        }
        takes_all += c.admin_takes_all;
        alloc += c.allocation_violations;
        excl += c.exclusivity_violations;
    }
    Ok(PathStats {
        mean_payouts: payouts_m.iter().map(|m| m.mean).collect(),
        std_payouts: payouts_m.iter().map(Moments::std_dev).collect(),
        stderr_payouts: payouts_m.iter().map(Moments::std_error).collect(),
        admin_takes_all: takes_all,
        n_paths: settings.paths,
        seed: settings.seed,
        allocation_violations: alloc,
        exclusivity_violations: excl,
        audited: settings.audit,
        generator: GENERATOR_ID.to_string(),
        chunk_size: settings.chunk_size,
    })
}

/// Payouts `(pi / p) I_i` of a centralized insurer charging the pure premium
/// `pi` for a benefit of `pi / p`.
pub fn centralized_benchmark(pi: f64, p: f64, indicators: &[bool]) -> Result<Vec<f64>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::DegenerateProbability(p));
    }
    let benefit = pi / p;
    Ok(indicators.iter().map(|&i| if i { benefit } else { 0.0 }).collect())
}

/// Fair homogeneous scheme: `n` participants investing `pi` each and, when
/// active, an administrator investing `n pi q^n / (1 - q^n)`.
pub fn homogeneous_fair_scheme(n: usize, p: f64, pi: f64, mode: Mode) -> Result<InvestmentVector> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateProbability(p));
    }
    let q = 1.0 - p;
    let qn = q.powi(n as i32);
    let admin = match mode {
        Mode::Active => n as f64 * pi * qn / (1.0 - qn),
        Mode::Passive => 0.0,
    };
    let mut amounts = vec![pi; n];
    amounts.push(admin);
    InvestmentVector::new(amounts, mode)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceSettings {
    pub p: f64,
    pub pi: f64,
    pub paths: u64,
    pub seed: u64,
    pub mode: Mode,
    pub workers: Option<usize>,
    pub chunk_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Estimate of `E|W_i(n) - (pi / p) I_i|`, averaged over participants
    /// within each path.
    pub mean_abs_gap: f64,
    pub gap_stderr: f64,
    /// Simulated `E[W_{n+1}(n)]`.
    pub admin_mean: f64,
    pub admin_stderr: f64,
    /// The administrator's fair investment (0 when passive).
    pub admin_investment: f64,
    pub allocation_violations: u64,
    pub n_paths: u64,
    pub seed: u64,
}

/// Simulates fair homogeneous uniform-unit pools of increasing size and
/// measures their distance to the centralized benchmark.
pub fn convergence_experiment(pool_sizes: &[usize], settings: &ConvergenceSettings) -> Result<Vec<ConvergenceRow>> {
    let (p, pi) = (settings.p, settings.pi);
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateProbability(p));
    }
    if !(pi > 0.0 && pi.is_finite()) {
        return Err(Error::InvalidSettings(format!("participant investment {pi} must be positive")));
    }
    if pool_sizes.is_empty() || pool_sizes[0] == 0 || pool_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSettings("pool sizes must be positive and increasing".into()));
    }
    if settings.paths < 2 {
        return Err(Error::InsufficientSamples {
            got: settings.paths as usize,
            min: 2,
        });
    }
    let benefit = pi / p;
    pool_sizes
        .iter()
        .map(|&n| {
            let inv = homogeneous_fair_scheme(n, p, pi, settings.mode)?;
            let rule = Rule::uniform_tontine().bind_fixed(n)?;
            let sampler = LossSampler::Bernoulli(BernoulliModel::homogeneous(n, p)?);
            let chunks = run_chunked(settings.paths, settings.chunk_size, settings.seed, settings.workers, |_, start, len, rng| {
                let (mut gap, mut admin, mut violations) = (Moments::default(), Moments::default(), 0u64);
                for k in 0..len {
                    let scenario = sampler.sample(rng);
                    let shares = rule.evaluate(&scenario).map_err(|e| e.on_path(start + k))?;
                    let w = payouts(&inv, &shares).map_err(|e| e.on_path(start + k))?;
                    violations += !(w.fully_allocated(&inv) && w.mutually_exclusive()) as u64;
                    let crate::rules::Scenario::Indicators(ind) = &scenario else {
                        unreachable!("Bernoulli sampler yields indicators")
                    };
                    let total_gap: f64 = w.payouts()[..n]
                        .iter()
                        .zip(ind.indicators())
                        .map(|(&x, &i)| (x - if i { benefit } else { 0.0 }).abs())
                        .sum();
                    gap.push(total_gap / n as f64);
                    admin.push(w.payouts()[n]);
                }
                Ok((gap, admin, violations))
            })?;
            let (mut gap, mut admin, mut violations) = (Moments::default(), Moments::default(), 0);
            for (g, a, v) in &chunks {
                gap.merge(g);
                admin.merge(a);
                violations += v;
            }
            Ok(ConvergenceRow {
                n,
                mean_abs_gap: gap.mean,
                gap_stderr: gap.std_error(),
                admin_mean: admin.mean,
                admin_stderr: admin.std_error(),
                admin_investment: inv.admin(),
                allocation_violations: violations,
                n_paths: settings.paths,
                seed: settings.seed,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub participant: usize,
    pub investment: f64,
    pub active: f64,
    pub passive: f64,
    /// `active - passive`.
    pub difference: f64,
    /// `pi_{n+1} E[P_i] - pi_i E[P_{n+1}]`.
    pub predicted_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub method: Method,
    pub coincide: bool,
    pub tolerance: f64,
    pub expected_shares: Vec<f64>,
}

/// Expected participant payouts with the active administrator and with a
/// passive one (same participant investments, none from the administrator).
///
/// The shares are computed once for the active scheme: no rule lets the
/// administrator's own unit affect who receives what, so the passive scheme
/// shares them.
pub fn compare_active_passive(
    inv_active: &InvestmentVector,
    rule: &Rule,
    model: &BernoulliModel,
    method: MethodChoice,
    mc: &MonteCarloSettings,
) -> Result<Comparison> {
    if inv_active.mode() != Mode::Active {
        return Err(Error::ModeMismatch {
            expected: Mode::Active,
            found: inv_active.mode(),
        });
    }
    if model.participants() != inv_active.participants() {
        return Err(Error::DimensionMismatch {
            expected: inv_active.participants(),
            found: model.participants(),
        });
    }
    let exp = expected_shares(&rule.bind(inv_active)?, model, method, mc)?;
    let n = inv_active.participants();
    let total = inv_active.total();
    let pool = inv_active.participants_total();
    let admin_pi = inv_active.admin();
    let refund = exp.admin_mean();
    let tolerance = 1e-9 * total;
    let rows: Vec<ComparisonRow> = (0..n)
        .map(|i| {
            let pi = inv_active.amounts()[i];
            let m = exp.means[i];
            let active = total * m;
            let passive = pool * m + pi * refund;
            ComparisonRow {
                participant: i,
                investment: pi,
                active,
                passive,
                difference: active - passive,
                predicted_difference: admin_pi * m - pi * refund,
            }
        })
        .collect();
    Ok(Comparison {
        coincide: rows.iter().all(|r| r.difference.abs() <= tolerance),
        rows,
        method: exp.method,
        tolerance,
        expected_shares: exp.means,
    })
}
