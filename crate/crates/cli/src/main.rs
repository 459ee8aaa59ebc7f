use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Simulate one scenario with the exact dynamics; writes trajectory.csv.
    Simulate,
    /// Decomposition arm; writes strategy, projected strategy and history.
    OptimizeApp,
    /// Reference arm: direct search on the full exact-dynamics SAA problem.
    OptimizeDirect,
    /// Validation report of a strategy (projected first if needed).
    Evaluate,
    /// Latin hypercube over the APP parameters, ranked on a validation set.
    Tune,
}

/// Preventive-maintenance scheduler for a fleet sharing a spare-parts stock.
#[derive(Debug, Parser)]
#[command(version, about)]
pub struct Args {
    /// System config (TOML). Defaults to the 10-component tuning system.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// APP iterations M.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Evaluations per subproblem per iteration for the APP arm and tuning;
    /// total evaluations for the direct arm (default: the APP arm's total,
    /// n·M·budget).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Optimization scenarios Q.
    #[arg(long)]
    pub scenarios: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub validation_scenarios: usize,
    /// APP parameter file (TOML).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub lhs_count: usize,
    /// Random restarts of the maximin Latin hypercube.
    #[arg(long, default_value_t = 10)]
    pub lhs_restarts: usize,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Strategy CSV: the input of evaluate and simulate, the start of
    /// optimize-direct.
    #[arg(long)]
    pub strategy: Option<PathBuf>,
    /// Optimization scenario simulated by simulate.
    #[arg(long, default_value_t = 0)]
    pub scenario_index: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match maintopt::exec::with_threads(args.threads, || run::run(&args)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
