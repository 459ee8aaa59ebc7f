use crate::error::Result;
use crate::relax::{relaxed_indicator, relaxed_partials, stock_partials, step_stock_relaxed_with, Relaxed, SetDescriptor};
use crate::sysmodel::{Scenario, SystemConfig};

use super::state::Iterate;

/// Relaxed stock path of every scenario driven by the iterate's component
/// bars. The stock constraint has a single feasible point, so this is the
/// subproblem's solution whatever its proximal and coordination terms.
pub fn solve_stock_subproblem(iterate: &Iterate, cfg: &SystemConfig) -> Vec<Vec<f64>> {
    (0..iterate.bars.len())
        .map(|q| stock_path(iterate, q, cfg))
        .collect()
}

pub(crate) fn stock_path(iterate: &Iterate, q: usize, cfg: &SystemConfig) -> Vec<f64> {
    let (n, dim) = (cfg.n, cfg.state_dim());
    let alpha = iterate.schedule.alpha;
    let bars = &iterate.bars[q];
    let mut ev = Relaxed { alpha };
    let mut s = vec![0.0; cfg.horizon + 1];
    s[0] = cfg.s_init as f64;
    for t in 0..cfg.horizon {
        let layer = bars.layer(t, n, dim);
        let mut z = 0.0;
        for c in layer.chunks_exact(dim) {
            z += relaxed_indicator(SetDescriptor::Singleton(0.0), c[0], alpha);
        }
        s[t + 1] = step_stock_relaxed_with(&mut ev, layer, s[t], z, cfg);
    }
    s
}

/// Adjoint recursion for the stock multiplier of scenario `q`:
///
/// `Λ_{S,T} = −γ_s(S*_T − S̄_T)`,
/// `Λ_{S,t} = −γ_s(S*_t − S̄_t) + Σ_i (∂f_i/∂S_t)ᵀ Λ̄_{i,t+1} + (∂f_S/∂S_t) Λ_{S,t+1}`.
///
/// The component partials are taken at the iterate's bars (`X̄`, `S̄`, `ū`),
/// the stock partial at `(X̄_t, S*_t)`.
pub fn stock_multiplier_backward(
    q: usize,
    s_star: &[f64],
    iterate: &Iterate,
    scenario: &Scenario,
    cfg: &SystemConfig,
) -> Result<Vec<f64>> {
    scenario.check_dims(cfg)?;
    let (n, horizon, dim) = (cfg.n, cfg.horizon, cfg.state_dim());
    let sch = iterate.schedule;
    let bars = &iterate.bars[q];
    let lam_bar = &iterate.multipliers;
    let mut lam = vec![0.0; horizon + 1];
    lam[horizon] = -sch.gamma_s * (s_star[horizon] - bars.s[horizon]);
    let mut u_t = vec![0.0; n];
    let mut w_t = vec![0.0; n];
    for t in (0..horizon).rev() {
        for i in 0..n {
            u_t[i] = iterate.u.get(i, t);
            w_t[i] = scenario.get(i, t);
        }
        let layer = bars.layer(t, n, dim);
        let part = relaxed_partials(layer, bars.s[t], &u_t, &w_t, sch.alpha, cfg);
        let mut cross = 0.0;
        for (i, jac) in part.components.iter().enumerate() {
            cross += jac.ds_dot(lam_bar.comp_at(q, t + 1, i));
        }
        let ds = stock_partials(layer, s_star[t], sch.alpha, cfg).ds;
        lam[t] = -sch.gamma_s * (s_star[t] - bars.s[t]) + cross + ds * lam[t + 1];
    }
    Ok(lam)
}
