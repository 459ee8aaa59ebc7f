use crate::error::Result;
use crate::sysmodel::{
    fail_prob, ComponentParams, ComponentState, Scenario, Strategy, SystemConfig, Trajectory,
};

use super::indicator::{IndicatorEval, Relaxed, SetDescriptor};

use SetDescriptor::{NonNeg, Singleton, StrictPos};

/// Relaxed one-step update of a packed component state.
///
/// `bb` is the relaxed count of broken components with a smaller index,
/// `Σ_{j<i} I⁰(E_j)`. Returns this component's own `I⁰(E)` so callers can
/// accumulate `bb` and the stock's broken count with the same evaluator.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn step_component_relaxed_with<I: IndicatorEval>(
    ev: &mut I,
    bb: f64,
    x: &[f64],
    s: f64,
    u: f64,
    w: f64,
    comp: &ComponentParams,
    cfg: &SystemConfig,
    out: &mut [f64],
) -> f64 {
    let (e, a) = (x[0], x[1]);
    let p = &x[2..];
    let delta = cfg.delta_default;

    let z = ev.ind(Singleton(0.0), e);
    let b = bb + z;
    let av = ev.ind(NonNeg, s - b);
    let na = ev.ind(StrictPos, b - s);
    let pm = ev.ind(NonNeg, u - cfg.nu);
    let nf = ev.ind(
        NonNeg,
        w - fail_prob(comp.weibull_shape, comp.weibull_scale, a, cfg.dt),
    );
    let h = 1.0 - z;
    let g = pm + nf * (1.0 - pm);

    let e1 = av * z + g * h;
    out[0] = e1;
    out[1] = (a + 1.0) * (na * z + nf * (1.0 - pm) * h)
        + (1.0 - na) * z
        + ((1.0 - u) * a + 1.0) * pm * h;

    let y1 = ev.ind(Singleton(1.0), e);
    let q = ev.ind(Singleton(0.0), e1);
    let fail = y1 * q;

    let dd = p.len();
    let po = &mut out[2..];
    for d in 0..dd {
        po[d] = ev.ind(Singleton(delta), p[d]);
    }
    let r_last = po[dd - 1];
    let mut r_prev = 0.0;
    for d in 0..dd {
        let rd = po[d];
        let keep = (p[d] + 1.0) * (1.0 - rd) + delta * rd;
        let mut fill = (p[d] + 1.0) * (1.0 - rd) * r_last;
        if d >= 1 {
            fill += delta * r_prev;
        }
        if d + 1 < dd {
            fill += (p[d + 1] + 1.0) * (1.0 - r_last);
        }
        po[d] = keep * (1.0 - fail) + fill * fail;
        r_prev = rd;
    }
    z
}

/// Relaxed stock update given the layer of packed states at `t` and the
/// relaxed broken count `z_sum = Σ_i I⁰(E_i)`.
#[inline]
pub fn step_stock_relaxed_with<I: IndicatorEval>(
    ev: &mut I,
    layer: &[f64],
    s: f64,
    z_sum: f64,
    cfg: &SystemConfig,
) -> f64 {
    let dim = cfg.state_dim();
    let due = (cfg.supply_delay - 1) as f64;
    let mut arrivals = 0.0;
    for c in layer.chunks_exact(dim) {
        for &pd in &c[2..] {
            arrivals += ev.ind(Singleton(due), pd);
        }
    }
    s + arrivals - ev.min(s, z_sum)
}

/// Relaxed update of component `i` from the states of components `0..=i`.
pub fn step_component_relaxed(
    states: &[ComponentState],
    stock: f64,
    i: usize,
    u: f64,
    w: f64,
    alpha: f64,
    cfg: &SystemConfig,
) -> ComponentState {
    let mut ev = Relaxed { alpha };
    let bb: f64 = states[..i]
        .iter()
        .map(|c| ev.ind(Singleton(0.0), c.regime))
        .sum();
    let x = states[i].packed();
    let mut out = vec![0.0; x.len()];
    step_component_relaxed_with(&mut ev, bb, &x, stock, u, w, &cfg.components[i], cfg, &mut out);
    ComponentState::from_packed(&out)
}

/// Relaxed stock update.
pub fn step_stock_relaxed(
    states: &[ComponentState],
    stock: f64,
    alpha: f64,
    cfg: &SystemConfig,
) -> f64 {
    let mut ev = Relaxed { alpha };
    let z: f64 = states
        .iter()
        .map(|c| ev.ind(Singleton(0.0), c.regime))
        .sum();
    let layer: Vec<f64> = states.iter().flat_map(|c| c.packed()).collect();
    step_stock_relaxed_with(&mut ev, &layer, stock, z, cfg)
}

/// Relaxed simulation of the whole system into `tr`. Event logs are left
/// cleared since relaxed states carry no discrete events.
pub fn simulate_relaxed_with<I: IndicatorEval>(
    ev: &mut I,
    tr: &mut Trajectory,
    strategy: &Strategy,
    scenario: &Scenario,
    cfg: &SystemConfig,
) -> Result<()> {
    strategy.check_dims(cfg)?;
    scenario.check_dims(cfg)?;
    tr.reset(cfg);
    let (n, dim) = (cfg.n, cfg.state_dim());
    let w = n * dim;
    for t in 0..cfg.horizon {
        let (cur, next) = tr.x[t * w..(t + 2) * w].split_at_mut(w);
        let s = tr.stock[t];
        let mut bb = 0.0;
        for i in 0..n {
            let z = step_component_relaxed_with(
                ev,
                bb,
                &cur[i * dim..(i + 1) * dim],
                s,
                strategy.get(i, t),
                scenario.get(i, t),
                &cfg.components[i],
                cfg,
                &mut next[i * dim..(i + 1) * dim],
            );
            bb += z;
        }
        tr.stock[t + 1] = step_stock_relaxed_with(ev, cur, s, bb, cfg);
    }
    Ok(())
}

pub fn simulate_relaxed(
    strategy: &Strategy,
    scenario: &Scenario,
    alpha: f64,
    cfg: &SystemConfig,
) -> Result<Trajectory> {
    let mut tr = Trajectory::new(cfg);
    simulate_relaxed_with(&mut Relaxed { alpha }, &mut tr, strategy, scenario, cfg)?;
    Ok(tr)
}

/// Relaxed path of a single component with the other components frozen:
/// `bb[t]` is the frozen broken count of lower-index components and `s[t]`
/// the frozen stock. Writes `(T+1)·dim` packed states into `out`, starting
/// from the as-good-as-new state.
#[allow(clippy::too_many_arguments)]
pub fn simulate_component_relaxed(
    alpha: f64,
    bb: &[f64],
    s: &[f64],
    u: &[f64],
    w: &[f64],
    comp: &ComponentParams,
    cfg: &SystemConfig,
    out: &mut [f64],
) {
    let dim = cfg.state_dim();
    out[0] = 1.0;
    out[1] = 0.0;
    out[2..dim].fill(cfg.delta_default);
    let mut ev = Relaxed { alpha };
    for t in 0..cfg.horizon {
        let (cur, next) = out[t * dim..(t + 2) * dim].split_at_mut(dim);
        step_component_relaxed_with(&mut ev, bb[t], cur, s[t], u[t], w[t], comp, cfg, next);
    }
}
