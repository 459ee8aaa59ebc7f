use std::fmt;
use std::path::Path;

use serde::Serialize;

use maintopt::appdecomp::{app_fixed_point, APPParams};
use maintopt::dsearch::SearchBudget;
use maintopt::evalharness::{
    evaluate_strategy, generate_scenarios, optimize_direct, project_strategy, Dynamics, ScenarioDomain, ScenarioSet,
};
use maintopt::io;
use maintopt::sysmodel::{simulate, total_cost, Strategy, SystemConfig};
use maintopt::tuning::{lhs_params, tune};
use maintopt::{Error, Exec};

use crate::{Args, Mode};

/// A failed run and its exit status.
#[derive(Debug)]
pub struct Failure {
    status: u8,
    msg: String,
}

impl Failure {
    pub fn status(&self) -> u8 {
        self.status
    }

    /// Errors while loading inputs: unreadable or malformed files are
    /// configuration errors.
    fn input(e: Error) -> Self {
        let status = match e {
            Error::Dimension(_) => 3,
            Error::Domain(_) => 1,
            _ => 2,
        };
        Failure { status, msg: e.to_string() }
    }

    fn output(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => 4,
            Error::Config(_) | Error::Parse { .. } => 2,
            Error::Dimension(_) => 3,
            Error::Domain(_) => 1,
        };
        Failure { status, msg: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

type Result<T> = std::result::Result<T, Failure>;

/// Everything that determines the outputs of a run. Thread counts and
/// timings are left out on purpose.
#[derive(Serialize)]
struct RunInfo<'a> {
    version: &'a str,
    mode: Mode,
    seed: u64,
    config_file: Option<String>,
    strategy_file: Option<String>,
    validation_scenarios: usize,
    lhs_count: usize,
    lhs_restarts: usize,
    direct_budget: usize,
    scenario_index: usize,
    params: APPParams,
    config: &'a SystemConfig,
}

fn write(out: &Path, name: &str, text: &str) -> Result<()> {
    io::write_text(&out.join(name), text).map_err(Failure::output)
}

fn load_strategy(path: &Path, cfg: &SystemConfig) -> Result<Strategy> {
    let (u, nu) = io::read_strategy(path).map_err(Failure::input)?;
    u.check_dims(cfg).map_err(Failure::input)?;
    if nu != cfg.nu {
        log::warn!("{} was written with nu = {nu}; using nu = {} from the config", path.display(), cfg.nu);
    }
    Ok(u)
}

pub fn run(args: &Args) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => io::read_config(p).map_err(Failure::input)?,
        None => SystemConfig::small(),
    };
    if let Some(q) = args.scenarios {
        cfg.q = q;
    }
    if cfg.q == 0 {
        return Err(Failure::input(Error::Config("Q must be at least 1".into())));
    }
    let mut params = match &args.params {
        Some(p) => io::read_params(p).map_err(Failure::input)?,
        None => APPParams::large_fleet(),
    };
    if let Some(m) = args.iterations {
        params.iterations = m;
    }
    if let Some(b) = args.budget {
        params.subproblem_budget = b;
    }
    params.validate().map_err(Failure::input)?;
    let direct_budget = match args.mode {
        Mode::OptimizeDirect => args.budget.unwrap_or(cfg.n * params.iterations * params.subproblem_budget),
        _ => cfg.n * params.iterations * params.subproblem_budget,
    };

    let out = args.out.as_path();
    let info = RunInfo {
        version: env!("CARGO_PKG_VERSION"),
        mode: args.mode,
        seed: args.seed,
        config_file: args.config.as_ref().map(|p| p.display().to_string()),
        strategy_file: args.strategy.as_ref().map(|p| p.display().to_string()),
        validation_scenarios: args.validation_scenarios,
        lhs_count: args.lhs_count,
        lhs_restarts: args.lhs_restarts,
        direct_budget,
        scenario_index: args.scenario_index,
        params,
        config: &cfg,
    };
    write(out, "run_info.toml", &toml::to_string(&info).expect("run info serialises"))?;
    log::info!("mode {:?}, seed {}, n = {}, T = {}, Q = {}", args.mode, args.seed, cfg.n, cfg.horizon, cfg.q);

    let exec = Exec::Parallel;
    let validation = || {
        ScenarioSet::new(cfg.n, cfg.horizon, args.validation_scenarios, args.seed, ScenarioDomain::Validation)
            .map_err(Failure::input)
    };
    let optimization = || generate_scenarios(cfg.n, cfg.horizon, cfg.q, args.seed).map_err(Failure::input);
    let strategy_or_zero = || match &args.strategy {
        Some(p) => load_strategy(p, &cfg),
        None => Ok(Strategy::zeros(cfg.n, cfg.horizon)),
    };

    match args.mode {
        Mode::Simulate => {
            let u = strategy_or_zero()?;
            let set = ScenarioSet::new(cfg.n, cfg.horizon, args.scenario_index + 1, args.seed, ScenarioDomain::Optimization)
                .map_err(Failure::input)?;
            let tr = simulate(&u, &set.get(args.scenario_index), &cfg).map_err(Failure::input)?;
            let c = total_cost(&tr, &u, &cfg);
            log::info!("cost {:.3} (pm {:.3}, cm {:.3}, fo {:.3})", c.total, c.pm, c.cm, c.fo);
            write(out, "trajectory.csv", &io::trajectory_to_csv(&tr))
        }
        Mode::OptimizeApp => {
            let w = optimization()?;
            log::info!(
                "optimize-app: subproblems use relaxed dynamics, M = {}, {} evaluations per subproblem",
                params.iterations,
                params.subproblem_budget
            );
            let res = app_fixed_point(&cfg, &params, &w, args.seed, exec).map_err(Failure::input)?;
            write(out, "strategy.csv", &io::strategy_to_csv(&res.strategy, cfg.nu))?;
            write(out, "strategy_projected.csv", &io::strategy_to_csv(&project_strategy(&res.strategy, cfg.nu), cfg.nu))?;
            write(out, "history.csv", &io::history_to_csv(&res.history))?;
            write(out, "timing.csv", &io::timing_to_csv(&res.history))?;
            write(out, "params.toml", &io::params_to_toml(&params))
        }
        Mode::OptimizeDirect => {
            let w = optimization()?;
            let start = strategy_or_zero()?;
            log::info!("optimize-direct: exact dynamics, {direct_budget} evaluations");
            let (u, res) = optimize_direct(&cfg, &w, Dynamics::Exact, &start, &SearchBudget::new(direct_budget, args.seed))
                .map_err(Failure::input)?;
            log::info!("optimize-direct: SAA {:.3} after {} evaluations", res.value, res.evals);
            write(out, "strategy.csv", &io::strategy_to_csv(&u, cfg.nu))?;
            write(out, "strategy_projected.csv", &io::strategy_to_csv(&project_strategy(&u, cfg.nu), cfg.nu))
        }
        Mode::Evaluate => {
            let path = args
                .strategy
                .as_ref()
                .ok_or_else(|| Failure::input(Error::Config("evaluate needs --strategy".into())))?;
            let u = load_strategy(path, &cfg)?;
            let report = evaluate_strategy(&u, &validation()?, &cfg, exec).map_err(Failure::input)?;
            log::info!(
                "evaluate: exact dynamics on {} scenarios, mean cost {:.3}",
                report.scenarios,
                report.mean_cost
            );
            io::write_report(out, &report).map_err(Failure::output)
        }
        Mode::Tune => {
            let w = optimization()?;
            let samples = lhs_params(args.lhs_count, args.seed, args.lhs_restarts, params.iterations, params.subproblem_budget)
                .map_err(Failure::input)?;
            let res = tune(&cfg, &samples, &w, &validation()?, args.seed, exec).map_err(Failure::input)?;
            log::info!("tune: best sample {} with mean cost {:.3}", res.leaderboard[0].sample, res.leaderboard[0].mean_cost);
            write(out, "leaderboard.csv", &io::leaderboard_to_csv(&res.leaderboard))?;
            write(out, "best_params.toml", &io::params_to_toml(&res.best))
        }
    }
}
