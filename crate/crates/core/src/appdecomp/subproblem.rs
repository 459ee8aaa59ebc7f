use crate::dsearch::{minimize, SearchBudget};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::relax::{
    component_partials_into, fo_cost_gradient, maintenance_cost_gradient, relaxed_indicator,
    relaxed_partials, simulate_component_relaxed, step_component_relaxed_with, ComponentJacobian,
    IndicatorEval, Relaxed, SetDescriptor,
};
use crate::sysmodel::{discount, ComponentParams, Scenario, SystemConfig};

use super::params::Schedule;
use super::state::Iterate;

use SetDescriptor::{Singleton, StrictPos};

/// Frozen couplings of every component in one scenario, evaluated at the
/// bar point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCoupling {
    /// `Σ_{j<i} I⁰(Ē_{j,t})` at `[i·T + t]`.
    pub bb: Vec<f64>,
    /// `Σ_{j≠i} I⁰(Ē_{j,t}) I⁺*(Ā_{j,t})` at `[i·(T+1) + t]`.
    pub others: Vec<f64>,
    /// Linear coordination weight on `X_{i,t}` at `[(i·T + t)·dim ..]`:
    /// `−(∂f_S/∂X_i)ᵀ Λ̄_S − Σ_{j>i} (∂f_j/∂X_i)ᵀ Λ̄_j`, all at `t+1`.
    pub c: Vec<f64>,
}

/// Couplings of all scenarios for one iteration. Shared by the `n`
/// component subproblems.
#[derive(Debug, Clone, PartialEq)]
pub struct Coordination {
    pub scenarios: Vec<ScenarioCoupling>,
}

impl Coordination {
    pub fn new(iterate: &Iterate, scenarios: &[Scenario], cfg: &SystemConfig, exec: Exec) -> Result<Self> {
        iterate.check(cfg, scenarios)?;
        let scenarios = exec.map(scenarios.len(), |q| scenario_coupling(iterate, q, &scenarios[q], cfg));
        Ok(Coordination { scenarios })
    }
}

fn scenario_coupling(it: &Iterate, q: usize, w: &Scenario, cfg: &SystemConfig) -> ScenarioCoupling {
    let (n, horizon, dim) = (cfg.n, cfg.horizon, cfg.state_dim());
    let alpha = it.schedule.alpha;
    let bars = &it.bars[q];
    let lam = &it.multipliers;
    let mut bb = vec![0.0; n * horizon];
    let mut others = vec![0.0; n * (horizon + 1)];
    let mut c = vec![0.0; n * horizon * dim];
    let mut u_t = vec![0.0; n];
    let mut w_t = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut suffix = vec![0.0; n + 1];

    for t in 0..=horizon {
        let layer = bars.layer(t, n, dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let x = &layer[i * dim..(i + 1) * dim];
            *yi = relaxed_indicator(Singleton(0.0), x[0], alpha) * relaxed_indicator(StrictPos, x[1], alpha);
        }
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + y[i];
        }
        let mut prefix = 0.0;
        for i in 0..n {
            others[i * (horizon + 1) + t] = prefix + suffix[i + 1];
            prefix += y[i];
        }
        if t == horizon {
            break;
        }

        for i in 0..n {
            u_t[i] = it.u.get(i, t);
            w_t[i] = w.get(i, t);
        }
        let part = relaxed_partials(layer, bars.s[t], &u_t, &w_t, alpha, cfg);
        let mut zsum = 0.0;
        for i in 0..n {
            bb[i * horizon + t] = zsum;
            zsum += relaxed_indicator(Singleton(0.0), layer[i * dim], alpha);
        }
        let ls = lam.stock[q][t + 1];
        // g = Σ_{j>i} ⟨dbb_j, Λ̄_{j,t+1}⟩, accumulated from the last component.
        let mut g = 0.0;
        for i in (0..n).rev() {
            let ci = &mut c[(i * horizon + t) * dim..(i * horizon + t + 1) * dim];
            for (k, ck) in ci.iter_mut().enumerate() {
                *ck = -part.stock.dx[i * dim + k] * ls;
            }
            ci[0] -= part.dz[i] * g;
            g += part.components[i].dbb_dot(lam.comp_at(q, t + 1, i));
        }
    }
    ScenarioCoupling { bb, others, c }
}

/// Frozen data of one scenario as seen by component `i`.
#[derive(Debug, Clone)]
struct View<'a> {
    bb: &'a [f64],
    s: &'a [f64],
    w: &'a [f64],
    others: &'a [f64],
    c: &'a [f64],
    xbar: Vec<f64>,
}

/// The subproblem on component `i`: other components, the stock and the
/// multipliers are frozen at the bar point, and the states of `i` are
/// eliminated by simulating its relaxed dynamics.
#[derive(Debug, Clone)]
pub struct ComponentSubproblem<'a> {
    pub i: usize,
    cfg: &'a SystemConfig,
    comp: &'a ComponentParams,
    schedule: Schedule,
    ubar: &'a [f64],
    views: Vec<View<'a>>,
    beta: Vec<f64>,
}

/// Result of one component subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSolution {
    pub u: Vec<f64>,
    /// Per scenario, time-major `(T+1)·dim` relaxed states at `u`.
    pub paths: Vec<Vec<f64>>,
    /// Per scenario, time-major `(T+1)·dim` multipliers.
    pub multipliers: Vec<Vec<f64>>,
    /// Objective at the warm start `ū_i`.
    pub start_value: f64,
    pub value: f64,
    pub evals: usize,
}

impl<'a> ComponentSubproblem<'a> {
    pub fn new(
        i: usize,
        iterate: &'a Iterate,
        coord: &'a Coordination,
        scenarios: &'a [Scenario],
        cfg: &'a SystemConfig,
    ) -> Result<Self> {
        if i >= cfg.n {
            return Err(Error::Dimension(format!("component {i} of {}", cfg.n)));
        }
        if coord.scenarios.len() != scenarios.len() {
            return Err(Error::Dimension("coordination built for another scenario set".into()));
        }
        let (n, horizon, dim) = (cfg.n, cfg.horizon, cfg.state_dim());
        let views = scenarios
            .iter()
            .zip(&coord.scenarios)
            .zip(&iterate.bars)
            .map(|((w, sc), bars)| {
                let mut xbar = Vec::with_capacity((horizon + 1) * dim);
                for t in 0..=horizon {
                    xbar.extend_from_slice(bars.comp(t, i, n, dim));
                }
                View {
                    bb: &sc.bb[i * horizon..(i + 1) * horizon],
                    s: &bars.s,
                    w: w.row(i),
                    others: &sc.others[i * (horizon + 1)..(i + 1) * (horizon + 1)],
                    c: &sc.c[i * horizon * dim..(i + 1) * horizon * dim],
                    xbar,
                }
            })
            .collect();
        Ok(ComponentSubproblem {
            i,
            cfg,
            comp: &cfg.components[i],
            schedule: iterate.schedule,
            ubar: iterate.u.row(i),
            views,
            beta: (0..=horizon).map(|t| discount(cfg.tau, t)).collect(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    pub fn objective(&self, u: &[f64]) -> f64 {
        self.objective_with(&mut Relaxed {
            alpha: self.schedule.alpha,
        }, u)
    }

    /// Mean over scenarios of the relaxed maintenance cost of `i`, the
    /// forced-outage cost with `i` substituted, the state proximal term and
    /// the coordination term, plus the control proximal term.
    pub fn objective_with<I: IndicatorEval>(&self, ev: &mut I, u: &[f64]) -> f64 {
        let (horizon, dim) = (self.cfg.horizon, self.cfg.state_dim());
        let comp = self.comp;
        let gx = self.schedule.gamma_x;
        let mut buf = vec![0.0; 2 * dim];
        let mut total = 0.0;
        for v in &self.views {
            let (mut cur, mut next) = buf.split_at_mut(dim);
            cur[0] = 1.0;
            cur[1] = 0.0;
            cur[2..].fill(self.cfg.delta_default);
            let mut acc = 0.0;
            for t in 0..=horizon {
                let beta = self.beta[t];
                let ze = ev.ind(Singleton(0.0), cur[0]);
                if t < horizon {
                    acc += beta * comp.c_p * u[t] * u[t];
                }
                acc += beta * comp.c_c * ze * ev.ind(Singleton(0.0), cur[1]);
                let y = v.others[t] + ze * ev.ind(StrictPos, cur[1]);
                acc += beta * self.cfg.c_f * ev.min(1.0, y);
                let xb = &v.xbar[t * dim..(t + 1) * dim];
                let prox: f64 = cur.iter().zip(xb).map(|(a, b)| (a - b) * (a - b)).sum();
                acc += 0.5 * gx * prox;
                if t == horizon {
                    break;
                }
                let ct = &v.c[t * dim..(t + 1) * dim];
                acc += cur.iter().zip(ct).map(|(a, b)| a * b).sum::<f64>();
                step_component_relaxed_with(ev, v.bb[t], cur, v.s[t], u[t], v.w[t], comp, self.cfg, next);
                std::mem::swap(&mut cur, &mut next);
            }
            total += acc;
        }
        let prox_u: f64 = u.iter().zip(self.ubar).map(|(a, b)| (a - b) * (a - b)).sum();
        total / self.views.len() as f64 + 0.5 * self.schedule.gamma_u * prox_u
    }

    /// Relaxed state paths of `i` under `u`, one per scenario.
    pub fn paths(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let (horizon, dim) = (self.cfg.horizon, self.cfg.state_dim());
        self.views
            .iter()
            .map(|v| {
                let mut out = vec![0.0; (horizon + 1) * dim];
                simulate_component_relaxed(self.schedule.alpha, v.bb, v.s, u, v.w, self.comp, self.cfg, &mut out);
                out
            })
            .collect()
    }

    /// Adjoint recursion for the multipliers of `i`'s dynamics along the
    /// given paths:
    ///
    /// `Λ_T = −∇ℓ_T`, `Λ_t = −∇ℓ_t − c_t + (∂f_i/∂X_t)ᵀ Λ_{t+1}`,
    ///
    /// where `ℓ_t` gathers the costs and the state proximal term at `t`.
    pub fn multipliers(&self, u: &[f64], paths: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.views
            .iter()
            .zip(paths)
            .map(|(v, x)| self.backward(v, u, x, None))
            .collect()
    }

    fn backward(&self, v: &View<'_>, u: &[f64], x: &[f64], mut du: Option<&mut [f64]>) -> Vec<f64> {
        let cfg = self.cfg;
        let (horizon, dim) = (cfg.horizon, cfg.state_dim());
        let (alpha, gx) = (self.schedule.alpha, self.schedule.gamma_x);
        let mut lam = vec![0.0; (horizon + 1) * dim];
        let mut jac = ComponentJacobian::new(dim);
        let mut carry = vec![0.0; dim];
        for t in (0..=horizon).rev() {
            let xt = &x[t * dim..(t + 1) * dim];
            let ut = (t < horizon).then(|| u[t]);
            let (me, ma, _) = maintenance_cost_gradient(xt, ut, t, alpha, self.comp, cfg);
            let (fe, fa) = fo_cost_gradient(xt, v.others[t], t, alpha, cfg);
            let xb = &v.xbar[t * dim..(t + 1) * dim];
            if t < horizon {
                component_partials_into(alpha, v.bb[t], xt, v.s[t], u[t], v.w[t], self.comp, cfg, &mut jac);
                let next = &lam[(t + 1) * dim..(t + 2) * dim];
                jac.dx_t_mul(next, &mut carry);
                if let Some(g) = du.as_deref_mut() {
                    g[t] -= jac.du_dot(next);
                }
            }
            let ct = if t < horizon { &v.c[t * dim..(t + 1) * dim] } else { &[][..] };
            let lt = &mut lam[t * dim..(t + 1) * dim];
            for k in 0..dim {
                let mut val = -gx * (xt[k] - xb[k]);
                if t < horizon {
                    val += carry[k] - ct[k];
                }
                lt[k] = val;
            }
            lt[0] -= me + fe;
            lt[1] -= ma + fa;
        }
        lam
    }

    /// Gradient of [`ComponentSubproblem::objective`] w.r.t. `u` through the
    /// adjoint: `mean_q[2β_t C^P u_t − (∂f_i/∂u_t)ᵀ Λ_{t+1}] + γ_u(u_t − ū_t)`.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let horizon = self.cfg.horizon;
        let paths = self.paths(u);
        let mut g = vec![0.0; horizon];
        for (v, x) in self.views.iter().zip(&paths) {
            let mut gq = vec![0.0; horizon];
            self.backward(v, u, x, Some(&mut gq));
            for t in 0..horizon {
                g[t] += gq[t];
            }
        }
        let q = self.views.len() as f64;
        for t in 0..horizon {
            g[t] = g[t] / q
                + 2.0 * self.beta[t] * self.comp.c_p * u[t]
                + self.schedule.gamma_u * (u[t] - self.ubar[t]);
        }
        g
    }

    /// Minimize over `u_i ∈ [0,1]^T` from the warm start `ū_i`, then recover
    /// the states and multipliers at the solution.
    pub fn solve(&self, budget: &SearchBudget) -> Result<ComponentSolution> {
        let horizon = self.cfg.horizon;
        let start_value = self.objective(self.ubar);
        let bounds = vec![(0.0, 1.0); horizon];
        let res = minimize(|u| self.objective(u), self.ubar, &bounds, budget)?;
        debug_assert!(res.value <= start_value);
        let paths = self.paths(&res.x);
        let multipliers = self.multipliers(&res.x, &paths);
        Ok(ComponentSolution {
            start_value,
            value: res.value,
            evals: res.evals,
            multipliers,
            paths,
            u: res.x,
        })
    }
}

/// Objective of the subproblem on component `i` at the candidate `u`.
/// Rebuilds the couplings; inside the fixed-point loop use
/// [`ComponentSubproblem`] directly.
pub fn component_subproblem_objective(
    i: usize,
    u: &[f64],
    iterate: &Iterate,
    scenarios: &[Scenario],
    cfg: &SystemConfig,
) -> Result<f64> {
    check_control(u, cfg)?;
    let coord = Coordination::new(iterate, scenarios, cfg, Exec::Sequential)?;
    Ok(ComponentSubproblem::new(i, iterate, &coord, scenarios, cfg)?.objective(u))
}

pub fn solve_component_subproblem(
    i: usize,
    iterate: &Iterate,
    scenarios: &[Scenario],
    cfg: &SystemConfig,
    budget: &SearchBudget,
) -> Result<ComponentSolution> {
    let coord = Coordination::new(iterate, scenarios, cfg, Exec::Sequential)?;
    ComponentSubproblem::new(i, iterate, &coord, scenarios, cfg)?.solve(budget)
}

/// Multipliers of component `i` for the control `u` (states recovered by
/// simulation), one time-major sequence per scenario.
pub fn component_multiplier_backward(
    i: usize,
    u: &[f64],
    iterate: &Iterate,
    scenarios: &[Scenario],
    cfg: &SystemConfig,
) -> Result<Vec<Vec<f64>>> {
    check_control(u, cfg)?;
    let coord = Coordination::new(iterate, scenarios, cfg, Exec::Sequential)?;
    let sp = ComponentSubproblem::new(i, iterate, &coord, scenarios, cfg)?;
    let paths = sp.paths(u);
    Ok(sp.multipliers(u, &paths))
}

fn check_control(u: &[f64], cfg: &SystemConfig) -> Result<()> {
    if u.len() != cfg.horizon {
        return Err(Error::Dimension(format!(
            "control of length {} for horizon {}",
            u.len(),
            cfg.horizon
        )));
    }
    Ok(())
}
