//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances and runtime
//! limits are fixed; a failing criterion makes the target exit non-zero.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use poolshare::expectation::{
    expected_share_joint_counts, expected_shares_closed_form, expected_shares_enumeration,
    expected_shares_monte_carlo, homogeneous_expected_shares, MonteCarloSettings,
};
use poolshare::fairness::{
    active_passive_equivalence, check_fair_active, check_fair_passive, solve_fair_fixed_point, solve_fair_linear,
    two_participant_tontine_fair, Anchor, SolverSettings,
};
use poolshare::scheme::{payouts, ALLOCATION_TOL};
use poolshare::simulate::{
    convergence_experiment, homogeneous_fair_scheme, simulate_payouts, ConvergenceSettings, SimulationSettings,
};
use poolshare::stats::DEFAULT_CHUNK_SIZE;
use poolshare::{
    BernoulliModel, BoundRule, CustomRule, ExpectationReport, InvestmentVector, LossSampler, Mode, Rule,
};

type Check = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20_240_601);
    r.set_stream(stream);
    r
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn beta_rule(beta: f64) -> BoundRule {
    BoundRule::Custom(CustomRule::two_participant_beta(beta).unwrap())
}

/// Residuals of the all-agents system: `pi_i - (pi_1 + pi_2 + pi_3) E_i`.
fn system_all(pi: &[f64], p1: f64, p2: f64, beta: f64) -> [f64; 3] {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let s = pi[0] + pi[1] + pi[2];
    [
        pi[0] - s * p1 * (q2 + beta * p2),
        pi[1] - s * p2 * (q1 + (1.0 - beta) * p1),
        pi[2] - s * q1 * q2,
    ]
}

/// Residuals of the participants'-total system.
fn system_participants(pi: &[f64], p1: f64, p2: f64, beta: f64) -> [f64; 3] {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let t = pi[0] + pi[1];
    let some = 1.0 - q1 * q2;
    [
        pi[0] - t * p1 * (q2 + beta * p2) / some,
        pi[1] - t * p2 * (q1 + (1.0 - beta) * p1) / some,
        pi[2] - t * q1 * q2 / some,
    ]
}

/// Residuals of the administrator-anchored system.
fn system_admin(pi: &[f64], p1: f64, p2: f64, beta: f64) -> [f64; 2] {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    [
        pi[0] - pi[2] * p1 * (q2 + beta * p2) / (q1 * q2),
        pi[1] - pi[2] * p2 * (q1 + (1.0 - beta) * p1) / (q1 * q2),
    ]
}

fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn criterion_1() -> Check {
    let (p1, p2, beta) = (0.5, 1.0 / 6.0, 0.5);
    // fractions of the total read off the coin-and-die example
    let fractions = [(5.0 + beta) / 12.0, (2.0 - beta) / 12.0, 5.0 / 12.0];
    let oracle: Vec<f64> = fractions.iter().map(|f| 24.0 * f).collect();
    ensure!(max_abs_diff(&oracle, &[11.0, 3.0, 10.0]) < 1e-12, "oracle {oracle:?}");

    let exp = ok(expected_shares_enumeration(&beta_rule(beta), &ok(BernoulliModel::new(vec![p1, p2]))?))?;
    let routes = [
        ok(solve_fair_linear(&exp, Anchor::TotalAll(24.0), Mode::Active))?,
        ok(two_participant_tontine_fair(p1, p2, beta, Anchor::TotalAll(24.0), Mode::Active))?,
    ];
    for r in &routes {
        ensure!(max_abs_diff(r.amounts(), &[11.0, 3.0, 10.0]) <= 1e-10, "total=24 gave {:?}", r.amounts());
    }
    let anchored = [
        ok(two_participant_tontine_fair(p1, p2, beta, Anchor::ParticipantsTotal(7.0), Mode::Active))?,
        ok(two_participant_tontine_fair(p1, p2, beta, Anchor::AdminInvestment(5.0), Mode::Active))?,
        ok(solve_fair_linear(&exp, Anchor::ParticipantsTotal(3.5), Mode::Active))?,
        ok(solve_fair_linear(&exp, Anchor::AdminInvestment(1.0), Mode::Active))?,
    ];
    for v in &anchored {
        let c = v.amounts()[2] / 10.0;
        let scaled: Vec<f64> = [11.0, 3.0, 10.0].iter().map(|x| x * c).collect();
        ensure!(max_abs_diff(v.amounts(), &scaled) <= 1e-10, "{:?} is not a multiple of (11,3,10)", v.amounts());
    }
    Ok("(11,3,10) and all anchorings proportional within 1e-10".into())
}

fn criterion_2() -> Check {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p1 = r.random_range(0.01..0.99);
        let p2 = r.random_range(0.01..0.99);
        let beta = r.random_range(0.0..=1.0);
        let scale = r.random_range(0.5..10.0);
        let model = ok(BernoulliModel::new(vec![p1, p2]))?;
        let exp = ok(expected_shares_enumeration(&beta_rule(beta), &model))?;
        for anchor in [Anchor::TotalAll(scale), Anchor::ParticipantsTotal(scale), Anchor::AdminInvestment(scale)] {
            let v = ok(two_participant_tontine_fair(p1, p2, beta, anchor, Mode::Active))?;
            let pi = v.amounts();
            let res = sup(&system_all(pi, p1, p2, beta))
                .max(sup(&system_participants(pi, p1, p2, beta)))
                .max(sup(&system_admin(pi, p1, p2, beta)));
            let check = ok(check_fair_active(&v, &exp, 1e-10))?;
            ensure!(res <= 1e-10, "active systems residual {res:e} at p=({p1},{p2}) beta={beta}");
            ensure!(check.fair, "enumeration check residual {:e}", check.max_abs_residual);
            worst = worst.max(res).max(check.max_abs_residual);
        }
        let v = ok(two_participant_tontine_fair(p1, p2, beta, Anchor::ParticipantsTotal(scale), Mode::Passive))?;
        let pi = v.amounts();
        let passive = system_participants(pi, p1, p2, beta);
        ensure!(pi[2] == 0.0, "passive administrator invests {}", pi[2]);
        ensure!(sup(&passive[..2]) <= 1e-10, "passive system residual {:e}", sup(&passive[..2]));
        let check = ok(check_fair_passive(&v, &exp, 1e-10))?;
        ensure!(check.fair, "passive enumeration check residual {:e}", check.max_abs_residual);
        worst = worst.max(sup(&passive[..2])).max(check.max_abs_residual);
    }
    Ok(format!("200 triples, worst residual {worst:.1e}"))
}

fn criterion_3() -> Check {
    let closed = |p1: f64, p2: f64, admin: f64| {
        let (q1, q2) = (1.0 - p1, 1.0 - p2);
        let d = p1 * q2 + p2 * q1;
        [admin * (p1 / q1) * (1.0 - q1 * q2) / d, admin * (p2 / q2) * (1.0 - q1 * q2) / d]
    };
    let settings = SolverSettings::default();
    let model = ok(BernoulliModel::new(vec![0.5, 1.0 / 6.0]))?;
    let sol = ok(solve_fair_fixed_point(&Rule::investment_units(), &model, Anchor::AdminInvestment(30.0), &settings))?;
    let pi = sol.investments.amounts();
    let oracle = closed(0.5, 1.0 / 6.0, 30.0);
    ensure!(max_abs_diff(&oracle, &[35.0, 7.0]) < 1e-12, "closed form gives {oracle:?}");
    ensure!(
        ((pi[0] - 35.0) / 35.0).abs() <= 1e-8 && ((pi[1] - 7.0) / 7.0).abs() <= 1e-8,
        "coin and die gave {pi:?}"
    );

    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p1 = r.random_range(0.01..0.99);
        let p2 = r.random_range(0.01..0.99);
        let admin = r.random_range(1.0..50.0);
        let model = ok(BernoulliModel::new(vec![p1, p2]))?;
        let sol = ok(solve_fair_fixed_point(&Rule::investment_units(), &model, Anchor::AdminInvestment(admin), &settings))?;
        let pi = sol.investments.amounts();
        for (got, want) in pi.iter().zip(closed(p1, p2, admin)) {
            let rel = ((got - want) / want).abs();
            ensure!(rel <= 1e-8, "p=({p1},{p2}): {got} vs {want} (rel {rel:e})");
            worst = worst.max(rel);
        }
    }
    Ok(format!("(35,7) reproduced; 100 pairs, worst relative error {worst:.1e}"))
}

/// `(1 - q^n) / n` for `q = a / 2^b`, from exact integer arithmetic with a
/// single rounding.
fn dyadic_participant_share(a: u64, b: u32, n: u32) -> f64 {
    let den = 1u64 << (b * n);
    let num = den - a.pow(n);
    (num as f64 / n as f64) / den as f64
}

fn criterion_4() -> Check {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = r.random_range(1..=12);
        let probs: Vec<f64> = (0..n)
            .map(|_| match r.random_range(0..20) {
                0 => 0.0,
                1 => 1.0,
                _ => r.random_range(0.0..1.0),
            })
            .collect();
        let model = ok(BernoulliModel::new(probs))?;
        let rule = ok(Rule::uniform_tontine().bind_fixed(n))?;
        let e = ok(expected_shares_enumeration(&rule, &model))?.means;
        let c = ok(expected_shares_closed_form(&model))?.means;
        let mut j = (0..n).map(|i| expected_share_joint_counts(&model, i)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        j.push(model.admin_claim_probability());
        let d = max_abs_diff(&e, &c).max(max_abs_diff(&e, &j)).max(max_abs_diff(&c, &j));
        ensure!(d <= 1e-12, "model {k} (n={n}): engines differ by {d:e}");
        worst = worst.max(d);
    }
    // homogeneous pools: q = a / 2^b keeps q^n and 1 - q^n exact in binary
    for (a, b) in [(1u64, 1u32), (1, 2), (3, 2), (5, 3), (7, 3), (13, 4)] {
        let q = a as f64 / (1u64 << b) as f64;
        for n in 1..=12u32 {
            let (share, admin) = ok(homogeneous_expected_shares(n as usize, q))?;
            let exact_share = dyadic_participant_share(a, b, n);
            let exact_admin = q.powi(n as i32);
            ensure!(share == exact_share, "q={q} n={n}: {share} vs {exact_share}");
            ensure!(admin == exact_admin, "q={q} n={n}: {admin} vs {exact_admin}");
            let model = ok(BernoulliModel::homogeneous(n as usize, 1.0 - q))?;
            let rule = ok(Rule::uniform_tontine().bind_fixed(n as usize))?;
            for means in [
                ok(expected_shares_enumeration(&rule, &model))?.means,
                ok(expected_shares_closed_form(&model))?.means,
            ] {
                ensure!(means[n as usize] == exact_admin, "admin share {} vs {exact_admin}", means[n as usize]);
                let d = means[..n as usize].iter().fold(0.0f64, |m, x| m.max((x - exact_share).abs()));
                ensure!(d <= 1e-12, "q={q} n={n}: participant share off by {d:e}");
            }
        }
    }
    Ok(format!("100 models, worst pairwise gap {worst:.1e}; homogeneous formulas exact"))
}

fn criterion_5() -> Check {
    const PATHS: u64 = 1_000_000;
    let n = 5;
    let settings = SimulationSettings::new(PATHS, 55);
    let losses = LossSampler::ZeroInflatedExponential {
        zero_prob: vec![0.7, 0.8, 0.6, 0.9, 0.75],
        mean: vec![1.0, 2.0, 0.5, 3.0, 1.5],
    };
    let heavy = LossSampler::ZeroInflatedLognormal {
        zero_prob: vec![0.5, 0.6, 0.7, 0.8, 0.9],
        mu: vec![0.0, 0.3, -0.2, 1.0, 0.5],
        sigma: vec![1.0, 0.5, 1.5, 0.8, 1.2],
    };
    let indicators = LossSampler::Bernoulli(ok(BernoulliModel::new(vec![0.3, 0.2, 0.5, 0.1, 0.25]))?);
    let units = Rule::TontineUnits {
        strategy: poolshare::UnitStrategy::Explicit(vec![1.0, 2.0, 0.5, 3.0, 1.5, 1.0]),
        probs: None,
    };
    let mut total = 0u64;
    let mut admin_paths = 0u64;
    for mode in [Mode::Active, Mode::Passive] {
        let inv = match mode {
            Mode::Active => ok(InvestmentVector::active(vec![1.0, 2.5, 0.7, 3.0, 1.1, 0.9]))?,
            Mode::Passive => ok(InvestmentVector::passive(vec![1.0, 2.5, 0.7, 3.0, 1.1]))?,
        };
        for (name, rule, sampler) in [
            ("proportional", BoundRule::ProportionalLoss, &losses),
            ("order-statistic", BoundRule::OrderStatistic, &heavy),
            ("tontine", ok(units.bind(&inv))?, &indicators),
            ("uniform tontine", ok(Rule::uniform_tontine().bind_fixed(n))?, &indicators),
        ] {
            let stats = ok(simulate_payouts(&inv, &rule, sampler, &settings))?;
            ensure!(
                stats.allocation_violations == 0 && stats.exclusivity_violations == 0,
                "{name} {mode:?}: {} allocation, {} exclusivity violations",
                stats.allocation_violations,
                stats.exclusivity_violations
            );
            ensure!(stats.audited && stats.n_paths == PATHS, "{name}: audit not run");
            total += stats.n_paths;
            admin_paths += stats.admin_takes_all;
        }
        // independent re-audit of the payout formulas on fresh draws
        let rule = ok(Rule::uniform_tontine().bind_fixed(n))?;
        for s in indicators.draws(99).take(100_000) {
            let shares = ok(rule.evaluate(&s))?;
            let w = ok(payouts(&inv, &shares))?;
            let p = shares.shares();
            let pool: f64 = inv.participant_amounts().iter().sum();
            let expected: Vec<f64> = (0..=n)
                .map(|i| match (mode, i == n) {
                    (Mode::Active, _) => inv.total() * p[i],
                    (Mode::Passive, true) => 0.0,
                    (Mode::Passive, false) => pool * p[i] + inv.amounts()[i] * p[n],
                })
                .collect();
            ensure!(max_abs_diff(w.payouts(), &expected) <= 1e-12, "payout formula mismatch");
            let sum: f64 = w.payouts().iter().sum();
            let fund = match mode {
                Mode::Active => inv.total(),
                Mode::Passive => pool,
            };
            ensure!((sum - fund).abs() <= ALLOCATION_TOL * fund, "allocation {sum} vs {fund}");
            let participants: f64 = p[..n].iter().sum();
            ensure!(participants == 0.0 || p[n] == 0.0, "exclusivity broken: {p:?}");
        }
    }
    ensure!(admin_paths > 0, "no path exercised the administrator branch");
    Ok(format!("{total} audited paths, 0 violations ({admin_paths} administrator-takes-all)"))
}

fn random_model_and_shares(r: &mut ChaCha8Rng) -> Result<(usize, ExpectationReport), String> {
    let n = r.random_range(2..=8);
    let probs: Vec<f64> = (0..n).map(|_| r.random_range(0.05..0.95)).collect();
    let model = ok(BernoulliModel::new(probs))?;
    let rule = match r.random_range(0..3) {
        0 => ok(Rule::uniform_tontine().bind_fixed(n))?,
        1 => {
            let mut units: Vec<f64> = (0..n).map(|_| r.random_range(0.1..5.0)).collect();
            units.push(1.0);
            BoundRule::Tontine { units }
        }
        _ => BoundRule::OrderStatistic,
    };
    Ok((n, ok(expected_shares_enumeration(&rule, &model))?))
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let (upper, lower) = a.split_at_mut(row);
            let pivot = &upper[col];
            let target = &mut lower[0];
            let f = target[col] / pivot[col];
            for (x, y) in target[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * y;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn criterion_6() -> Check {
    const TOL: f64 = 1e-10;
    let mut r = rng(6);
    for k in 0..100 {
        let (n, exp) = random_model_and_shares(&mut r)?;
        let e = &exp.means;
        let a = exp.admin_mean();

        // participant-fair implies administrator-fair: fix the administrator's
        // investment, solve the participants' equations directly
        let admin = r.random_range(0.5..5.0);
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 - e[i] } else { -e[i] }).collect())
            .collect();
        let rhs: Vec<f64> = (0..n).map(|i| admin * e[i]).collect();
        let mut pi = solve_dense(matrix, rhs);
        pi.push(admin);
        let inv = ok(InvestmentVector::active(pi))?;
        let rep = ok(check_fair_active(&inv, &exp, TOL))?;
        ensure!(rep.participants_fair(), "instance {k}: participant solve not fair");
        ensure!(rep.residuals[n].abs() <= TOL, "instance {k}: admin residual {:e}", rep.residuals[n]);

        // no administrator investment: some participant pays more than expected
        let free: Vec<f64> = (0..n).map(|_| r.random_range(0.1..10.0)).chain([0.0]).collect();
        let rep = ok(check_fair_active(&ok(InvestmentVector::active(free))?, &exp, TOL))?;
        ensure!(rep.residuals[..n].iter().any(|&x| x > 0.0), "instance {k}: no participant overpays");

        // scaling, the admin fraction of the total and active/passive equivalence
        let fair = ok(solve_fair_linear(&exp, Anchor::TotalAll(r.random_range(0.5..5.0)), Mode::Active))?;
        let c = r.random_range(0.01..100.0);
        let scaled = ok(poolshare::scheme::scale_investments(&fair, c))?;
        let rep = ok(check_fair_active(&scaled, &exp, TOL * c.max(1.0)))?;
        ensure!(rep.fair, "instance {k}: scaling by {c} broke fairness ({:e})", rep.max_abs_residual);

        let total = fair.total();
        let l1 = total * (1.0 - a) - fair.participants_total();
        let l2 = total * a - fair.admin();
        ensure!(l1.abs() <= TOL && l2.abs() <= TOL, "instance {k}: admin fraction residuals {l1:e}, {l2:e}");

        let eq = ok(active_passive_equivalence(&fair, &exp, TOL))?;
        ensure!(eq.equivalent && eq.active_participants_fair && eq.passive_participants_fair && eq.admin_fair,
            "instance {k}: fair scheme not equivalent: {eq:?}");
        let mut skew = fair.amounts().to_vec();
        skew[0] *= 1.5;
        let eq = ok(active_passive_equivalence(&ok(InvestmentVector::active(skew))?, &exp, TOL))?;
        ensure!(eq.equivalent && !eq.active_participants_fair, "instance {k}: unfair scheme not equivalent");
    }
    Ok("admin fairness, overpayment, scaling, admin fraction and equivalence hold on 100 instances".into())
}

fn criterion_7() -> Check {
    let mut lines = Vec::new();
    for mode in [Mode::Active, Mode::Passive] {
        let settings = ConvergenceSettings {
            p: 0.5,
            pi: 1.0,
            paths: 100_000,
            seed: 77,
            mode,
            workers: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
        };
        let rows = ok(convergence_experiment(&[10, 100, 1000], &settings))?;
        let gaps: Vec<f64> = rows.iter().map(|r| r.mean_abs_gap).collect();
        ensure!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{mode:?} gaps not decreasing: {gaps:?}");
        ensure!(gaps[2] < 0.05, "{mode:?} gap at n=1000 is {}", gaps[2]);
        ensure!(rows.iter().all(|r| r.allocation_violations == 0), "{mode:?}: audit failed");
        lines.push(format!("{mode:?} gaps {:.4}/{:.4}/{:.4}", gaps[0], gaps[1], gaps[2]));
    }
    let n = 50;
    let q: f64 = 0.5;
    let participants = n as f64;
    let scheme = ok(homogeneous_fair_scheme(n, 0.5, 1.0, Mode::Active))?;
    let qn = q.powi(n as i32);
    let analytic = participants * qn / (1.0 - qn);
    ensure!(scheme.admin() == analytic, "admin investment {} vs {analytic}", scheme.admin());
    let (_, admin_share) = ok(homogeneous_expected_shares(n, q))?;
    let admin_payout = scheme.total() * admin_share;
    ensure!(admin_payout < 1e-10 * participants, "admin expected payout {admin_payout:e}");
    lines.push(format!("admin at n=50 {admin_payout:.1e}"));
    Ok(lines.join("; "))
}

fn criterion_8() -> Check {
    let mut worst_z = 0.0f64;
    let mut r = rng(8);
    for n in [2usize, 5, 10] {
        let probs: Vec<f64> = (0..n).map(|_| r.random_range(0.1..0.9)).collect();
        let model = ok(BernoulliModel::new(probs))?;
        let rule = ok(Rule::uniform_tontine().bind_fixed(n))?;
        let exact = ok(expected_shares_enumeration(&rule, &model))?;
        let sampler = LossSampler::Bernoulli(model);
        let settings = MonteCarloSettings::new(1_000_000, 42 + n as u64);
        let mc = ok(expected_shares_monte_carlo(&rule, &sampler, &settings))?;
        let se = mc.stderr.clone().unwrap();
        for ((m, e), s) in mc.means.iter().zip(&exact.means).zip(&se) {
            ensure!((m - e).abs() <= 4.0 * s, "n={n}: {m} vs {e} (stderr {s:e})");
            if *s > 0.0 {
                worst_z = worst_z.max((m - e).abs() / s);
            }
        }
        if n == 10 {
            for workers in [1, 4, 8] {
                let again = ok(expected_shares_monte_carlo(&rule, &sampler, &settings.with_workers(workers)))?;
                let same = again.means.iter().zip(&mc.means).all(|(a, b)| a.to_bits() == b.to_bits())
                    && again.stderr.as_ref().unwrap().iter().zip(&se).all(|(a, b)| a.to_bits() == b.to_bits());
                ensure!(same, "{workers} workers changed the result");
            }
        }
    }
    Ok(format!("all within 4 stderr (max {worst_z:.2}); bit-identical at 1/4/8 workers"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "coin-and-die fairness", 1, criterion_1),
        (2, "two-participant closed forms", 5, criterion_2),
        (3, "investment-weighted units closed form via fixed point", 10, criterion_3),
        (4, "expectation engines agree", 30, criterion_4),
        (5, "pathwise invariants", 60, criterion_5),
        (6, "fairness propositions", 30, criterion_6),
        (7, "convergence to centralized insurance", 120, criterion_7),
        (8, "Monte Carlo vs exact, worker invariance", 60, criterion_8),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{msg}, but took {:.2}s (limit {limit}s)", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS criterion {id} ({name}) [{:.2}s]: {msg}", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}) [{:.2}s]: {msg}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
