use crate::error::{Error, Result};

use super::failure::fail_prob;
use super::types::{ComponentState, Scenario, Strategy, Trajectory};
use super::{ComponentParams, SystemConfig};

/// What happened to one component during one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepEvents {
    pub pm: bool,
    pub cm: bool,
    pub failure: bool,
}

/// Whether component `i` (0-based) can be replaced at this step: the stock
/// covers every broken component with index `≤ i`.
pub fn spare_available(states: &[ComponentState], stock: f64, i: usize) -> bool {
    let broken = states[..=i].iter().filter(|c| c.is_broken()).count();
    stock >= broken as f64
}

/// Exact one-step update of component `i` given the states of components
/// `0..=i` at `t`.
pub fn step_component(
    states: &[ComponentState],
    stock: f64,
    i: usize,
    u: f64,
    w: f64,
    cfg: &SystemConfig,
) -> ComponentState {
    let before = states[..i].iter().filter(|c| c.is_broken()).count();
    let x = states[i].packed();
    let mut out = vec![0.0; x.len()];
    step_component_packed(before, &x, stock, u, w, &cfg.components[i], cfg, &mut out);
    ComponentState::from_packed(&out)
}

/// Exact update on packed states. `broken_before` counts broken components
/// with a smaller index.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn step_component_packed(
    broken_before: usize,
    x: &[f64],
    stock: f64,
    u: f64,
    w: f64,
    comp: &ComponentParams,
    cfg: &SystemConfig,
    out: &mut [f64],
) -> StepEvents {
    let (e, a) = (x[0], x[1]);
    let p = &x[2..];
    let delta = cfg.delta_default;
    let mut ev = StepEvents::default();
    if e == 0.0 {
        if stock >= (broken_before + 1) as f64 {
            ev.cm = true;
            out[0] = 1.0;
            out[1] = 1.0;
        } else {
            out[0] = 0.0;
            out[1] = a + 1.0;
        }
    } else if u >= cfg.nu {
        ev.pm = true;
        out[0] = 1.0;
        out[1] = (1.0 - u) * a + 1.0;
    } else if w < fail_prob(comp.weibull_shape, comp.weibull_scale, a, cfg.dt) {
        ev.failure = true;
        out[0] = 0.0;
        out[1] = 0.0;
    } else {
        out[0] = 1.0;
        out[1] = a + 1.0;
    }

    let po = &mut out[2..];
    let dd = p.len();
    let aged = |v: f64| if v == delta { delta } else { v + 1.0 };
    if !ev.failure {
        for d in 0..dd {
            po[d] = aged(p[d]);
        }
    } else if p[dd - 1] != delta {
        // Full: drop the oldest record.
        for d in 0..dd - 1 {
            po[d] = p[d + 1] + 1.0;
        }
        po[dd - 1] = 0.0;
    } else {
        let mut placed = false;
        for d in 0..dd {
            po[d] = if p[d] != delta {
                p[d] + 1.0
            } else if !placed {
                placed = true;
                0.0
            } else {
                delta
            };
        }
    }
    ev
}

/// Exact stock update: arrivals of parts ordered `D − 1` steps ago, minus the
/// parts consumed by corrective maintenance.
pub fn step_stock(states: &[ComponentState], stock: f64, cfg: &SystemConfig) -> f64 {
    let layer: Vec<f64> = states.iter().flat_map(|c| c.packed()).collect();
    step_stock_packed(&layer, stock, cfg)
}

#[inline]
pub fn step_stock_packed(layer: &[f64], stock: f64, cfg: &SystemConfig) -> f64 {
    let dim = cfg.state_dim();
    let due = (cfg.supply_delay - 1) as f64;
    let mut arrivals = 0.0;
    let mut broken = 0.0;
    for c in layer.chunks_exact(dim) {
        if c[0] == 0.0 {
            broken += 1.0;
        }
        for &pd in &c[2..] {
            if pd == due {
                arrivals += 1.0;
            }
        }
    }
    stock + arrivals - stock.min(broken)
}

/// Roll the exact dynamics forward over the whole horizon.
pub fn simulate(strategy: &Strategy, scenario: &Scenario, cfg: &SystemConfig) -> Result<Trajectory> {
    let mut tr = Trajectory::new(cfg);
    simulate_into(&mut tr, strategy, scenario, cfg)?;
    Ok(tr)
}

/// Allocation-free variant of [`simulate`] reusing `tr`.
pub fn simulate_into(
    tr: &mut Trajectory,
    strategy: &Strategy,
    scenario: &Scenario,
    cfg: &SystemConfig,
) -> Result<()> {
    strategy.check_dims(cfg)?;
    scenario.check_dims(cfg)?;
    if tr.n != cfg.n || tr.horizon != cfg.horizon || tr.dim != cfg.state_dim() {
        return Err(Error::Dimension("trajectory buffer does not match config".into()));
    }
    tr.reset(cfg);
    let (n, dim) = (cfg.n, cfg.state_dim());
    let w = n * dim;
    for t in 0..cfg.horizon {
        let (cur, next) = tr.x[t * w..(t + 2) * w].split_at_mut(w);
        let stock = tr.stock[t];
        let mut broken_before = 0usize;
        for i in 0..n {
            let xi = &cur[i * dim..(i + 1) * dim];
            let ev = step_component_packed(
                broken_before,
                xi,
                stock,
                strategy.get(i, t),
                scenario.get(i, t),
                &cfg.components[i],
                cfg,
                &mut next[i * dim..(i + 1) * dim],
            );
            if xi[0] == 0.0 {
                broken_before += 1;
            }
            tr.pm[t * n + i] = ev.pm;
            tr.cm[t * n + i] = ev.cm;
            tr.failure[(t + 1) * n + i] = ev.failure;
        }
        tr.stock[t + 1] = step_stock_packed(cur, stock, cfg);
    }
    for t in 0..=cfg.horizon {
        tr.forced_outage[t] = (0..n).any(|i| tr.regime(t, i) == 0.0 && tr.age(t, i) > 0.0);
    }
    Ok(())
}
