use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsearch::SearchBudget;
use crate::error::{Error, Result};
use crate::evalharness::{saa_objective, Dynamics};
use crate::exec::Exec;
use crate::sysmodel::{Scenario, Strategy, SystemConfig};

use super::params::{update_schedules, APPParams, Schedule};
use super::state::Iterate;
use super::stock::{stock_multiplier_backward, stock_path};
use super::subproblem::{ComponentSubproblem, Coordination};

/// Bookkeeping of one fixed-point iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub schedule: Schedule,
    /// Exact-dynamics SAA objective of `u^{k+1}` on the optimization set.
    pub saa_exact: f64,
    /// Relaxed SAA objective of `u^{k+1}` at this iteration's `α`.
    pub saa_relaxed: f64,
    /// Subproblem objective of each component at its warm start.
    pub start_values: Vec<f64>,
    /// Subproblem objective of each component at its solution.
    pub best_values: Vec<f64>,
    pub evals: usize,
    /// `max |u^{k+1} − u^k|`.
    pub control_change: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct AppOutcome {
    pub strategy: Strategy,
    pub history: Vec<IterationRecord>,
    pub iterate: Iterate,
}

/// Solver seed of subproblem `i` at iteration `k`: stream `k·n + i` of a
/// ChaCha8 generator seeded with the run seed.
pub fn subproblem_seed(seed: u64, k: usize, i: usize, n: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((k * n + i) as u64);
    rng.next_u64()
}

/// Fixed-point loop with parallel component subproblems and a sequential
/// stock update on the fresh component solutions. Returns `u^M`.
pub fn app_fixed_point(
    cfg: &SystemConfig,
    p: &APPParams,
    scenarios: &[Scenario],
    seed: u64,
    exec: Exec,
) -> Result<AppOutcome> {
    cfg.validate()?;
    p.validate()?;
    let mut iterate = Iterate::initial(cfg, p, scenarios)?;
    let mut history = Vec::with_capacity(p.iterations);
    for k in 0..p.iterations {
        let rec = app_iteration(&mut iterate, k, p, scenarios, cfg, seed, exec)?;
        log::info!(
            "iteration {k}: alpha {:.4} gamma_u {:.4} saa {:.3} (relaxed {:.3}) du {:.3e}",
            rec.schedule.alpha,
            rec.schedule.gamma_u,
            rec.saa_exact,
            rec.saa_relaxed,
            rec.control_change
        );
        history.push(rec);
    }
    Ok(AppOutcome {
        strategy: iterate.u.clone(),
        history,
        iterate,
    })
}

/// One pass of the loop body: schedules for `k`, all component subproblems
/// at the old bars, installation of `(X, u, Λ_i)`, then the stock solution
/// and its multiplier.
pub fn app_iteration(
    iterate: &mut Iterate,
    k: usize,
    p: &APPParams,
    scenarios: &[Scenario],
    cfg: &SystemConfig,
    seed: u64,
    exec: Exec,
) -> Result<IterationRecord> {
    let clock = Instant::now();
    let (n, dim) = (cfg.n, cfg.state_dim());
    iterate.k = k;
    iterate.schedule = update_schedules(k, p);

    let coord = Coordination::new(iterate, scenarios, cfg, exec)?;
    let it: &Iterate = iterate;
    let solutions = exec.map(n, |i| {
        let sp = ComponentSubproblem::new(i, it, &coord, scenarios, cfg)?;
        sp.solve(&SearchBudget::new(p.subproblem_budget, subproblem_seed(seed, k, i, n)))
    });

    let mut control_change = 0.0f64;
    let mut start_values = Vec::with_capacity(n);
    let mut best_values = Vec::with_capacity(n);
    let mut evals = 0;
    for (i, sol) in solutions.into_iter().enumerate() {
        let sol = sol?;
        if sol.value > sol.start_value {
            return Err(Error::Domain(format!(
                "subproblem {i} at iteration {k} increased its objective"
            )));
        }
        for (a, b) in iterate.u.row(i).iter().zip(&sol.u) {
            control_change = control_change.max((a - b).abs());
        }
        iterate.u.row_mut(i).copy_from_slice(&sol.u);
        for (q, path) in sol.paths.iter().enumerate() {
            let bars = &mut iterate.bars[q];
            for t in 0..=cfg.horizon {
                let o = (t * n + i) * dim;
                bars.x[o..o + dim].copy_from_slice(&path[t * dim..(t + 1) * dim]);
            }
            iterate.multipliers.set_component(q, i, &sol.multipliers[q]);
        }
        start_values.push(sol.start_value);
        best_values.push(sol.value);
        evals += sol.evals;
    }

    let it: &Iterate = iterate;
    let stock: Vec<Vec<f64>> = exec.map(scenarios.len(), |q| stock_path(it, q, cfg));
    let lam_s = exec.map(scenarios.len(), |q| {
        stock_multiplier_backward(q, &stock[q], it, &scenarios[q], cfg)
    });
    for (q, (s, l)) in stock.into_iter().zip(lam_s).enumerate() {
        iterate.bars[q].s = s;
        iterate.multipliers.stock[q] = l?;
    }

    let alpha = iterate.schedule.alpha;
    Ok(IterationRecord {
        k,
        schedule: iterate.schedule,
        saa_exact: saa_objective(&iterate.u, scenarios, cfg, Dynamics::Exact, exec)?,
        saa_relaxed: saa_objective(&iterate.u, scenarios, cfg, Dynamics::Relaxed { alpha }, exec)?,
        start_values,
        best_values,
        evals,
        control_change,
        seconds: clock.elapsed().as_secs_f64(),
    })
}
