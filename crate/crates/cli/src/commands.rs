use std::path::PathBuf;

use serde::Serialize;

use poolshare::expectation::{
    expected_shares, expected_shares_monte_carlo, BernoulliModel, ExpectationReport, LossSampler, MethodChoice,
    MonteCarloSettings,
};
use poolshare::fairness::{
    check_fair, default_tolerance, solve_fair_fixed_point, solve_fair_linear, FairnessReport, SolverSettings,
};
use poolshare::simulate::{
    compare_active_passive, convergence_experiment, simulate_payouts, ConvergenceSettings, SimulationSettings,
};
use poolshare::stats::DEFAULT_CHUNK_SIZE;
use poolshare::{
    BoundRule, CustomRule, IndicatorScenario, InvestmentVector, LossScenario, Mode, Rule, Scenario,
};

use crate::config::{values, ModelConfig, Num, RuleConfig, ScenarioConfig};
use crate::error::{compute, config, solver, CliError};
use crate::output::{num, Metadata, Writer};

const DEFAULT_SAMPLES: u64 = 100_000;
const DEFAULT_PATHS: u64 = 100_000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_POOL_SIZES: [usize; 4] = [1, 10, 100, 1000];

/// Options shared by every command.
#[derive(Debug, Clone)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub no_audit: bool,
}

/// What a successful command reports back to the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Unfair,
}

struct Context {
    cfg: ScenarioConfig,
    opts: Options,
    out: Writer,
}

impl Context {
    fn seed(&self) -> u64 {
        self.opts.seed.or(self.cfg.run.seed).unwrap_or(DEFAULT_SEED)
    }

    fn chunk_size(&self) -> u64 {
        self.cfg.run.chunk_size.unwrap_or(DEFAULT_CHUNK_SIZE)
    }

    fn mc_settings(&self) -> MonteCarloSettings {
        MonteCarloSettings {
            samples: self.cfg.run.n_samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed(),
            workers: self.opts.threads,
            chunk_size: self.chunk_size(),
        }
    }

    fn method(&self) -> MethodChoice {
        self.cfg.run.method.unwrap_or_default()
    }

    fn model_spec(&self) -> Result<&ModelConfig, CliError> {
        self.cfg.model.as_ref().ok_or_else(|| CliError::Config("`model` is required".into()))
    }

    /// Independent-indicator model, when the config describes one.
    fn bernoulli(&self) -> Result<Option<BernoulliModel>, CliError> {
        Ok(match self.model_spec()? {
            ModelConfig::Bernoulli { probs } => Some(BernoulliModel::new(values(probs)).map_err(config)?),
            ModelConfig::Homogeneous { n, p } => Some(BernoulliModel::homogeneous(*n, p.0).map_err(config)?),
            _ => None,
        })
    }

    fn require_bernoulli(&self) -> Result<BernoulliModel, CliError> {
        self.bernoulli()?.ok_or_else(|| {
            CliError::Config("this command needs a `bernoulli` or `homogeneous` model".into())
        })
    }

    fn sampler(&self) -> Result<LossSampler, CliError> {
        if let Some(m) = self.bernoulli()? {
            return Ok(LossSampler::Bernoulli(m));
        }
        let sampler = match self.model_spec()? {
            ModelConfig::Constant { losses: Some(x), indicators: None } => {
                LossSampler::Constant(Scenario::Losses(LossScenario::new(values(x)).map_err(config)?))
            }
            ModelConfig::Constant { losses: None, indicators: Some(b) } => {
                LossSampler::Constant(Scenario::Indicators(IndicatorScenario::from_bits(b).map_err(config)?))
            }
            ModelConfig::Constant { .. } => {
                return Err(CliError::Config("a constant model needs exactly one of `losses` and `indicators`".into()))
            }
            ModelConfig::ZeroInflatedExponential { zero_prob, mean } => LossSampler::ZeroInflatedExponential {
                zero_prob: values(zero_prob),
                mean: values(mean),
            },
            ModelConfig::ZeroInflatedLognormal { zero_prob, mu, sigma } => LossSampler::ZeroInflatedLognormal {
                zero_prob: values(zero_prob),
                mu: values(mu),
                sigma: values(sigma),
            },
            ModelConfig::Bernoulli { .. } | ModelConfig::Homogeneous { .. } => unreachable!(),
        };
        sampler.validate().map_err(config)?;
        Ok(sampler)
    }

    fn participants(&self) -> Result<usize, CliError> {
        Ok(self.sampler()?.participants())
    }

    fn rule(&self) -> Result<Rule, CliError> {
        let spec = self.cfg.rule.as_ref().ok_or_else(|| CliError::Config("`rule` is required".into()))?;
        Ok(match spec {
            RuleConfig::Proportional {} => Rule::ProportionalLoss,
            RuleConfig::OrderStatistic {} => Rule::OrderStatistic,
            RuleConfig::Tontine { units } => {
                let strategy = units.strategy();
                let probs = if strategy.needs_probabilities() { self.bernoulli()? } else { None };
                Rule::TontineUnits { strategy, probs }
            }
            RuleConfig::Beta { beta } => Rule::Custom(CustomRule::two_participant_beta(beta.0).map_err(config)?),
            RuleConfig::Custom { table } => {
                let entries = table
                    .iter()
                    .map(|e| Ok((IndicatorScenario::from_bits(&e.indicators).map_err(config)?, values(&e.shares))))
                    .collect::<Result<Vec<_>, CliError>>()?;
                Rule::Custom(CustomRule::from_table(entries))
            }
        })
    }

    fn investments(&self) -> Result<InvestmentVector, CliError> {
        let raw = self
            .cfg
            .investments
            .as_ref()
            .ok_or_else(|| CliError::Config("`investments` is required".into()))?;
        let amounts = values(raw);
        let n = self.participants()?;
        let inv = match (self.cfg.mode, amounts.len()) {
            (Mode::Passive, len) if len == n => InvestmentVector::passive(amounts),
            (mode, len) if len == n + 1 => InvestmentVector::new(amounts, mode),
            (_, len) => {
                return Err(CliError::Config(format!(
                    "expected {} investments for {n} participants, got {len}",
                    n + 1
                )))
            }
        };
        inv.map_err(config)
    }

    fn bind(&self, rule: &Rule) -> Result<BoundRule, CliError> {
        if self.cfg.investments.is_some() {
            rule.bind(&self.investments()?).map_err(config)
        } else {
            rule.bind_fixed(self.participants()?).map_err(config)
        }
    }

    /// Expected shares by the configured method. Sampler models only support
    /// Monte Carlo.
    fn expectations(&self, bound: &BoundRule) -> Result<ExpectationReport, CliError> {
        match self.bernoulli()? {
            Some(model) => expected_shares(bound, &model, self.method(), &self.mc_settings()).map_err(compute),
            None => match self.method() {
                MethodChoice::Auto | MethodChoice::MonteCarlo => {
                    expected_shares_monte_carlo(bound, &self.sampler()?, &self.mc_settings()).map_err(compute)
                }
                m => Err(CliError::Config(format!(
                    "method {m:?} needs a `bernoulli` or `homogeneous` model"
                ))),
            },
        }
    }

    fn metadata(&self, command: &'static str, exp: Option<&ExpectationReport>) -> Metadata {
        let meta = Metadata::new(command);
        match exp {
            Some(e) if e.seed.is_some() => meta.stochastic(self.seed(), self.chunk_size()),
            _ => meta,
        }
    }

    fn fairness_table(&self, inv: &InvestmentVector, exp: &ExpectationReport, report: &FairnessReport) -> Result<(), CliError> {
        self.out.table(
            &["agent", "investment", "expected_share", "expected_payout", "residual"],
            (0..inv.amounts().len()).map(|i| {
                vec![
                    (i + 1).to_string(),
                    num(inv.amounts()[i]),
                    num(exp.means[i]),
                    num(report.expected_payouts[i]),
                    num(report.residuals[i]),
                ]
            }),
        )
    }
}

pub fn run(command: &'static str, opts: Options) -> Result<Outcome, CliError> {
    let cfg = ScenarioConfig::load(&opts.config).map_err(CliError::Config)?;
    let out = Writer::new(&opts.out)?;
    let ctx = Context { cfg, opts, out };
    match command {
        "expect" => expect(&ctx),
        "solve-fair" => solve_fair(&ctx),
        "check-fair" => check_fair_cmd(&ctx),
        "simulate" => simulate(&ctx),
        "converge" => converge(&ctx),
        "compare" => compare(&ctx),
        other => Err(CliError::Config(format!("unknown command {other}"))),
    }
}

fn expect(ctx: &Context) -> Result<Outcome, CliError> {
    let bound = ctx.bind(&ctx.rule()?)?;
    let exp = ctx.expectations(&bound)?;
    ctx.out.report(&ctx.metadata("expect", Some(&exp)), &ctx.cfg, &exp)?;
    ctx.out.table(
        &["agent", "expected_share", "stderr"],
        exp.means.iter().enumerate().map(|(i, &m)| {
            let se = exp.stderr.as_ref().map(|s| num(s[i])).unwrap_or_default();
            vec![(i + 1).to_string(), num(m), se]
        }),
    )?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct SolverInfo {
    iterations: usize,
    last_change: f64,
    payout_ratio_spread: f64,
}

#[derive(Serialize)]
struct Solved<'a> {
    investments: &'a InvestmentVector,
    fairness: &'a FairnessReport,
    expectations: &'a ExpectationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    solver: Option<SolverInfo>,
}

fn solve_fair(ctx: &Context) -> Result<Outcome, CliError> {
    let anchor = ctx.cfg.anchor.ok_or_else(|| CliError::Config("`anchor` is required".into()))?;
    anchor.validate().map_err(config)?;
    let rule = ctx.rule()?;
    let (inv, exp, report, info) = if rule.reads_investments() {
        if ctx.cfg.mode != Mode::Active {
            return Err(CliError::Config(
                "rules whose units depend on the investments are solved in active mode".into(),
            ));
        }
        let model = ctx.require_bernoulli()?;
        let defaults = SolverSettings::default();
        let settings = SolverSettings {
            tolerance: ctx.cfg.run.solver_tolerance.map_or(defaults.tolerance, |t| t.0),
            max_iterations: ctx.cfg.run.max_iterations.unwrap_or(defaults.max_iterations),
            damping: ctx.cfg.run.damping.map_or(defaults.damping, |d| d.0),
        };
        let sol = solve_fair_fixed_point(&rule, &model, anchor, &settings).map_err(solver)?;
        log::info!("fixed point after {} iterations", sol.iterations);
        let info = SolverInfo {
            iterations: sol.iterations,
            last_change: sol.last_change,
            payout_ratio_spread: sol.payout_ratio_spread,
        };
        (sol.investments, sol.expectations, sol.report, Some(info))
    } else {
        let bound = rule.bind_fixed(ctx.participants()?).map_err(config)?;
        let exp = ctx.expectations(&bound)?;
        let inv = solve_fair_linear(&exp, anchor, ctx.cfg.mode).map_err(solver)?;
        let tol = ctx.cfg.run.tolerance.map_or(default_tolerance(&inv), |t| t.0);
        let report = check_fair(&inv, &exp, tol).map_err(compute)?;
        (inv, exp, report, None)
    };
    let result = Solved {
        investments: &inv,
        fairness: &report,
        expectations: &exp,
        solver: info,
    };
    ctx.out.report(&ctx.metadata("solve-fair", Some(&exp)), &ctx.cfg, &result)?;
    ctx.fairness_table(&inv, &exp, &report)?;
    let mut solved = ctx.cfg.clone();
    solved.anchor = None;
    solved.investments = Some(inv.amounts().iter().map(|&a| Num(a)).collect());
    ctx.out.config("solved_config.json", &solved)?;
    Ok(Outcome::Ok)
}

fn check_fair_cmd(ctx: &Context) -> Result<Outcome, CliError> {
    let inv = ctx.investments()?;
    let bound = ctx.rule()?.bind(&inv).map_err(config)?;
    let exp = ctx.expectations(&bound)?;
    let tol = ctx.cfg.run.tolerance.map_or(default_tolerance(&inv), |t| t.0);
    let report = check_fair(&inv, &exp, tol).map_err(compute)?;

    #[derive(Serialize)]
    struct Checked<'a> {
        fairness: &'a FairnessReport,
        expectations: &'a ExpectationReport,
    }
    let result = Checked {
        fairness: &report,
        expectations: &exp,
    };
    ctx.out.report(&ctx.metadata("check-fair", Some(&exp)), &ctx.cfg, &result)?;
    ctx.fairness_table(&inv, &exp, &report)?;
    Ok(if report.fair { Outcome::Ok } else { Outcome::Unfair })
}

fn simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let inv = ctx.investments()?;
    let bound = ctx.rule()?.bind(&inv).map_err(config)?;
    let settings = SimulationSettings {
        paths: ctx.cfg.run.n_paths.unwrap_or(DEFAULT_PATHS),
        seed: ctx.seed(),
        workers: ctx.opts.threads,
        chunk_size: ctx.chunk_size(),
        audit: !ctx.opts.no_audit,
    };
    let stats = simulate_payouts(&inv, &bound, &ctx.sampler()?, &settings).map_err(compute)?;
    let mut meta = Metadata::new("simulate").stochastic(settings.seed, settings.chunk_size);
    meta.audit = Some(settings.audit);
    ctx.out.report(&meta, &ctx.cfg, &stats)?;
    ctx.out.table(
        &["agent", "investment", "mean_payout", "std_payout", "stderr"],
        (0..inv.amounts().len()).map(|i| {
            vec![
                (i + 1).to_string(),
                num(inv.amounts()[i]),
                num(stats.mean_payouts[i]),
                num(stats.std_payouts[i]),
                num(stats.stderr_payouts[i]),
            ]
        }),
    )?;
    if stats.allocation_violations > 0 || stats.exclusivity_violations > 0 {
        return Err(CliError::Compute(poolshare::Error::InvalidSettings(format!(
            "payout audit failed: {} allocation and {} exclusivity violations",
            stats.allocation_violations, stats.exclusivity_violations
        ))));
    }
    Ok(Outcome::Ok)
}

fn converge(ctx: &Context) -> Result<Outcome, CliError> {
    let p = match (ctx.cfg.run.p, &ctx.cfg.model) {
        (Some(p), _) => p.0,
        (None, Some(ModelConfig::Homogeneous { p, .. })) => p.0,
        _ => return Err(CliError::Config("converge needs `run.p` or a homogeneous model".into())),
    };
    let sizes = ctx.cfg.run.pool_sizes.clone().unwrap_or_else(|| DEFAULT_POOL_SIZES.to_vec());
    let settings = ConvergenceSettings {
        p,
        pi: ctx.cfg.run.pi.map_or(1.0, |x| x.0),
        paths: ctx.cfg.run.n_paths.unwrap_or(DEFAULT_PATHS),
        seed: ctx.seed(),
        mode: ctx.cfg.mode,
        workers: ctx.opts.threads,
        chunk_size: ctx.chunk_size(),
    };
    let rows = convergence_experiment(&sizes, &settings).map_err(|e| match e {
        poolshare::Error::InvalidSettings(_) | poolshare::Error::DegenerateProbability(_) => config(e),
        e => compute(e),
    })?;
    let meta = Metadata::new("converge").stochastic(settings.seed, settings.chunk_size);
    ctx.out.report(&meta, &ctx.cfg, &rows)?;
    ctx.out.table(
        &["n", "mean_abs_gap", "stderr", "admin_mean"],
        rows.iter()
            .map(|r| vec![r.n.to_string(), num(r.mean_abs_gap), num(r.gap_stderr), num(r.admin_mean)]),
    )?;
    Ok(Outcome::Ok)
}

fn compare(ctx: &Context) -> Result<Outcome, CliError> {
    let inv = ctx.investments()?;
    let model = ctx.require_bernoulli()?;
    let cmp = compare_active_passive(&inv, &ctx.rule()?, &model, ctx.method(), &ctx.mc_settings()).map_err(compute)?;
    let mut meta = Metadata::new("compare");
    if cmp.method == poolshare::Method::MonteCarlo {
        meta = meta.stochastic(ctx.seed(), ctx.chunk_size());
    }
    ctx.out.report(&meta, &ctx.cfg, &cmp)?;
    ctx.out.table(
        &["participant", "investment", "active", "passive", "difference", "predicted_difference"],
        cmp.rows.iter().map(|r| {
            vec![
                (r.participant + 1).to_string(),
                num(r.investment),
                num(r.active),
                num(r.passive),
                num(r.difference),
                num(r.predicted_difference),
            ]
        }),
    )?;
    Ok(Outcome::Ok)
}
