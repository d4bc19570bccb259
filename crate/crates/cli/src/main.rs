//! `poolshare`: run risk-sharing scenarios from JSON config files.
//!
//! Exit codes: 0 success (or fair), 1 unfair, 2 config error, 3 computation
//! error, 4 solver failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Options, Outcome};

#[derive(Parser)]
#[command(name = "poolshare", version, about = "Compensation-based risk sharing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for report.json and table.csv.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Skip the per-path payout audit.
    #[arg(long, global = true)]
    no_audit: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Expected relative shares of every agent.
    Expect,
    /// Solve for fair investments given an anchor.
    SolveFair,
    /// Check the configured investments for fairness (exit 1 if unfair).
    CheckFair,
    /// Simulate payouts path by path.
    Simulate,
    /// Convergence of homogeneous pools to centralized insurance.
    Converge,
    /// Expected payouts with an active versus a passive administrator.
    Compare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Expect => "expect",
            Command::SolveFair => "solve-fair",
            Command::CheckFair => "check-fair",
            Command::Simulate => "simulate",
            Command::Converge => "converge",
            Command::Compare => "compare",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("POOLSHARE_LOG", "warn")).init();
    let cli = Cli::parse();
    let Some(config) = cli.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let opts = Options {
        config,
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
        no_audit: cli.no_audit,
    };
    match commands::run(cli.command.name(), opts) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Unfair) => {
            eprintln!("not fair: see report.json for residuals");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
