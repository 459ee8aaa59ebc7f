use crate::error::{Error, Result};
use crate::relax::simulate_relaxed;
use crate::sysmodel::{Scenario, Strategy, SystemConfig};

use super::params::{update_schedules, APPParams, Schedule};

/// Relaxed state and stock trajectories of one scenario.
///
/// `x` is layer-major like [`crate::sysmodel::Trajectory::x`]: the packed
/// state of component `i` at `t` starts at `(t·n + i)·dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBars {
    pub x: Vec<f64>,
    pub s: Vec<f64>,
}

impl ScenarioBars {
    pub fn layer(&self, t: usize, n: usize, dim: usize) -> &[f64] {
        &self.x[t * n * dim..(t + 1) * n * dim]
    }

    pub fn comp(&self, t: usize, i: usize, n: usize, dim: usize) -> &[f64] {
        let o = (t * n + i) * dim;
        &self.x[o..o + dim]
    }
}

/// Multipliers of every scenario: `Λ_{i,t}` (one packed vector per component
/// and step) and the scalar `Λ_{S,t}`, for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet {
    pub n: usize,
    pub horizon: usize,
    pub dim: usize,
    /// Per scenario, laid out like [`ScenarioBars::x`].
    pub comp: Vec<Vec<f64>>,
    /// Per scenario, `T + 1` entries.
    pub stock: Vec<Vec<f64>>,
}

impl MultiplierSet {
    pub fn zeros(n: usize, horizon: usize, dim: usize, scenarios: usize) -> Self {
        MultiplierSet {
            n,
            horizon,
            dim,
            comp: vec![vec![0.0; (horizon + 1) * n * dim]; scenarios],
            stock: vec![vec![0.0; horizon + 1]; scenarios],
        }
    }

    pub fn scenarios(&self) -> usize {
        self.comp.len()
    }

    pub fn comp_at(&self, q: usize, t: usize, i: usize) -> &[f64] {
        let o = (t * self.n + i) * self.dim;
        &self.comp[q][o..o + self.dim]
    }

    /// Overwrite component `i`'s sequence in scenario `q` from a
    /// time-major `(T+1)·dim` buffer.
    pub fn set_component(&mut self, q: usize, i: usize, lam: &[f64]) {
        let (n, dim) = (self.n, self.dim);
        for t in 0..=self.horizon {
            let o = (t * n + i) * dim;
            self.comp[q][o..o + dim].copy_from_slice(&lam[t * dim..(t + 1) * dim]);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comp.iter().flatten().chain(self.stock.iter().flatten()).all(|v| v.is_finite())
    }
}

/// Everything the fixed-point loop carries from one iteration to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub k: usize,
    pub schedule: Schedule,
    /// Shared by all scenarios.
    pub u: Strategy,
    pub bars: Vec<ScenarioBars>,
    pub multipliers: MultiplierSet,
}

impl Iterate {
    /// `u⁰ = 0`, `(X⁰, S⁰)` the relaxed simulation of `u⁰` at `α⁰`, `Λ⁰ = 0`.
    pub fn initial(cfg: &SystemConfig, p: &APPParams, scenarios: &[Scenario]) -> Result<Self> {
        Self::from_strategy(cfg, p, scenarios, Strategy::zeros(cfg.n, cfg.horizon))
    }

    /// Start from an arbitrary strategy, with bars simulated at `α⁰` and zero
    /// multipliers.
    pub fn from_strategy(
        cfg: &SystemConfig,
        p: &APPParams,
        scenarios: &[Scenario],
        u: Strategy,
    ) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::Config("need at least one scenario".into()));
        }
        u.check_dims(cfg)?;
        let schedule = update_schedules(0, p);
        let mut bars = Vec::with_capacity(scenarios.len());
        for w in scenarios {
            let tr = simulate_relaxed(&u, w, schedule.alpha, cfg)?;
            bars.push(ScenarioBars {
                x: tr.x,
                s: tr.stock,
            });
        }
        Ok(Iterate {
            k: 0,
            schedule,
            multipliers: MultiplierSet::zeros(cfg.n, cfg.horizon, cfg.state_dim(), scenarios.len()),
            u,
            bars,
        })
    }

    pub(crate) fn check(&self, cfg: &SystemConfig, scenarios: &[Scenario]) -> Result<()> {
        self.u.check_dims(cfg)?;
        let q = scenarios.len();
        if self.bars.len() != q || self.multipliers.scenarios() != q {
            return Err(Error::Dimension(format!(
                "iterate holds {} scenarios, {} given",
                self.bars.len(),
                q
            )));
        }
        for w in scenarios {
            w.check_dims(cfg)?;
        }
        let len = (cfg.horizon + 1) * cfg.n * cfg.state_dim();
        if self.bars.iter().any(|b| b.x.len() != len || b.s.len() != cfg.horizon + 1) {
            return Err(Error::Dimension("bar trajectories do not match the config".into()));
        }
        Ok(())
    }
}
