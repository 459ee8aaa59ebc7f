use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::relax::{relaxed_total_cost, simulate_relaxed_with, Relaxed};
use crate::sysmodel::{simulate_into, total_cost, CostBreakdown, Scenario, Strategy, SystemConfig, Trajectory};

/// Which dynamics and costs to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dynamics {
    Exact,
    Relaxed { alpha: f64 },
}

impl std::fmt::Display for Dynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dynamics::Exact => write!(f, "exact"),
            Dynamics::Relaxed { alpha } => write!(f, "relaxed(alpha={alpha})"),
        }
    }
}

/// Cost of one scenario under `mode`, reusing `tr` as scratch.
pub fn scenario_cost(
    tr: &mut Trajectory,
    strategy: &Strategy,
    scenario: &Scenario,
    cfg: &SystemConfig,
    mode: Dynamics,
) -> Result<CostBreakdown> {
    match mode {
        Dynamics::Exact => {
            simulate_into(tr, strategy, scenario, cfg)?;
            Ok(total_cost(tr, strategy, cfg))
        }
        Dynamics::Relaxed { alpha } => {
            simulate_relaxed_with(&mut Relaxed { alpha }, tr, strategy, scenario, cfg)?;
            Ok(relaxed_total_cost(tr, strategy, alpha, cfg))
        }
    }
}

/// Sample-average objective `(1/Q) Σ_q [Σ_i j_i + j^F]`. Scenario costs are
/// summed in index order whatever the execution policy.
pub fn saa_objective(
    strategy: &Strategy,
    scenarios: &[Scenario],
    cfg: &SystemConfig,
    mode: Dynamics,
    exec: Exec,
) -> Result<f64> {
    if scenarios.is_empty() {
        return Err(Error::Config("need at least one scenario".into()));
    }
    strategy.check_dims(cfg)?;
    let costs = exec.map(scenarios.len(), |q| {
        let mut tr = Trajectory::new(cfg);
        scenario_cost(&mut tr, strategy, &scenarios[q], cfg, mode).map(|c| c.total)
    });
    let mut sum = 0.0;
    for c in costs {
        sum += c?;
    }
    Ok(sum / scenarios.len() as f64)
}

/// Sequential SAA evaluator with reusable scratch, for use inside a
/// blackbox solver.
#[derive(Debug, Clone)]
pub struct SaaEvaluator<'a> {
    cfg: &'a SystemConfig,
    scenarios: &'a [Scenario],
    mode: Dynamics,
    tr: Trajectory,
    strategy: Strategy,
}

impl<'a> SaaEvaluator<'a> {
    pub fn new(cfg: &'a SystemConfig, scenarios: &'a [Scenario], mode: Dynamics) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::Config("need at least one scenario".into()));
        }
        for w in scenarios {
            w.check_dims(cfg)?;
        }
        Ok(SaaEvaluator {
            cfg,
            scenarios,
            mode,
            tr: Trajectory::new(cfg),
            strategy: Strategy::zeros(cfg.n, cfg.horizon),
        })
    }

    pub fn eval(&mut self, strategy: &Strategy) -> f64 {
        let mut sum = 0.0;
        for w in self.scenarios {
            sum += scenario_cost(&mut self.tr, strategy, w, self.cfg, self.mode)
                .expect("dimensions checked on construction")
                .total;
        }
        sum / self.scenarios.len() as f64
    }

    /// Evaluate a flat component-major control vector.
    pub fn eval_flat(&mut self, u: &[f64]) -> f64 {
        let mut s = std::mem::replace(&mut self.strategy, Strategy::zeros(0, 0));
        s.as_mut_slice().copy_from_slice(u);
        let v = self.eval(&s);
        self.strategy = s;
        v
    }
}

/// Controls `≥ ν` become 1, the rest 0.
pub fn project_strategy(u: &Strategy, nu: f64) -> Strategy {
    u.project(nu)
}
