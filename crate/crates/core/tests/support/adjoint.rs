#![allow(dead_code, clippy::needless_range_loop)]

use maintopt::appdecomp::{
    component_multiplier_backward, solve_stock_subproblem, stock_multiplier_backward, APPParams,
    ComponentSubproblem, Coordination, Iterate, Schedule,
};
use maintopt::relax::{
    component_partials, fo_cost_gradient, maintenance_cost_gradient, relaxed_indicator,
    relaxed_partials, simulate_relaxed, stock_partials, Probe, SetDescriptor,
};
use maintopt::sysmodel::{Scenario, Strategy, SystemConfig};
use maintopt::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use SetDescriptor::{Singleton, StrictPos};

pub fn small_cfg(n: usize, horizon: usize, s: u32) -> SystemConfig {
    let mut c = SystemConfig::small().with_n(n);
    c.horizon = horizon;
    c.supply_delay = 2;
    c.s_init = s;
    c
}

pub fn params() -> APPParams {
    APPParams {
        iterations: 3,
        subproblem_budget: 50,
        ..APPParams::large_fleet()
    }
}

/// An iterate with random bars, multipliers and weights, so that every term
/// of the recursions is exercised.
pub fn random_iterate(rng: &mut ChaCha8Rng, n: usize, horizon: usize) -> (SystemConfig, Vec<Scenario>, Iterate) {
    let cfg = small_cfg(n, horizon, rng.random_range(0..3));
    let w: Vec<Scenario> = vec![Scenario::from_vec(
        n,
        horizon,
        (0..n * horizon).map(|_| rng.random::<f64>()).collect(),
    )
    .unwrap()];
    let mut it = Iterate::initial(&cfg, &params(), &w).unwrap();
    it.schedule = Schedule {
        gamma_x: rng.random_range(0.0..5.0),
        gamma_s: rng.random_range(0.0..5.0),
        gamma_u: rng.random_range(0.0..5.0),
        alpha: rng.random_range(1.0..5.0),
    };
    let ubar = Strategy::from_vec(n, horizon, (0..n * horizon).map(|_| rng.random::<f64>()).collect()).unwrap();
    let tr = simulate_relaxed(&ubar, &w[0], it.schedule.alpha, &cfg).unwrap();
    it.u = ubar;
    it.bars[0].x = tr.x.iter().map(|v| v + rng.random_range(-0.1..0.1)).collect();
    it.bars[0].s = tr.stock.iter().map(|v| v + rng.random_range(-0.3..0.3)).collect();
    for v in it.multipliers.comp[0].iter_mut() {
        *v = rng.random_range(-50.0..50.0);
    }
    for v in it.multipliers.stock[0].iter_mut() {
        *v = rng.random_range(-50.0..50.0);
    }
    (cfg, w, it)
}

/// Instance shape of check number `case`: n in {1, 2}, T in {3, 5}.
fn shape(case: usize) -> (usize, usize) {
    (1 + case % 2, if case % 4 < 2 { 3 } else { 5 })
}

fn bar_comp(it: &Iterate, t: usize, i: usize, cfg: &SystemConfig) -> Vec<f64> {
    it.bars[0].comp(t, i, cfg.n, cfg.state_dim()).to_vec()
}

/// Gradient of the Lagrangian w.r.t. `X_{i,t}` assembled from dense Jacobian
/// blocks, with every sum written out.
#[allow(clippy::too_many_arguments)]
fn lagrangian_grad_x(
    i: usize,
    t: usize,
    x_star: &[f64],
    u_star: &[f64],
    lam: &[f64],
    it: &Iterate,
    w: &Scenario,
    cfg: &SystemConfig,
) -> Vec<f64> {
    let (n, horizon, dim) = (cfg.n, cfg.horizon, cfg.state_dim());
    let sch = it.schedule;
    let alpha = sch.alpha;
    let xs = &x_star[t * dim..(t + 1) * dim];
    let xb = bar_comp(it, t, i, cfg);
    let mut g = vec![0.0; dim];

    let ut = (t < horizon).then(|| u_star[t]);
    let (me, ma, _) = maintenance_cost_gradient(xs, ut, t, alpha, &cfg.components[i], cfg);
    let mut others = 0.0;
    for j in 0..n {
        if j != i {
            let x = bar_comp(it, t, j, cfg);
            others += relaxed_indicator(Singleton(0.0), x[0], alpha) * relaxed_indicator(StrictPos, x[1], alpha);
        }
    }
    let (fe, fa) = fo_cost_gradient(xs, others, t, alpha, cfg);
    g[0] += me + fe;
    g[1] += ma + fa;
    for k in 0..dim {
        g[k] += sch.gamma_x * (xs[k] - xb[k]);
        // ∂Φ_{i,t}/∂X_{i,t} = I.
        g[k] += lam[t * dim + k];
    }
    if t == horizon {
        return g;
    }

    let layer = it.bars[0].layer(t, n, dim);
    let ubar: Vec<f64> = (0..n).map(|j| it.u.get(j, t)).collect();
    let wt: Vec<f64> = (0..n).map(|j| w.get(j, t)).collect();
    let part = relaxed_partials(layer, it.bars[0].s[t], &ubar, &wt, alpha, cfg);
    let lam_s = it.multipliers.stock[0][t + 1];
    for k in 0..dim {
        // Θ_S = S' − f_S: its X-partial is minus the stock Jacobian.
        g[k] -= part.stock.dx[i * dim + k] * lam_s;
    }
    for j in i + 1..n {
        let block = part.block(j, i);
        let lj = it.multipliers.comp_at(0, t + 1, j);
        for k in 0..dim {
            for r in 0..dim {
                g[k] -= block[r * dim + k] * lj[r];
            }
        }
    }
    let mut bb = 0.0;
    for j in 0..i {
        bb += relaxed_indicator(Singleton(0.0), layer[j * dim], alpha);
    }
    let jac = component_partials(alpha, bb, xs, it.bars[0].s[t], u_star[t], w.get(i, t), &cfg.components[i], cfg);
    for k in 0..dim {
        for r in 0..dim {
            g[k] -= jac.get(r, k) * lam[(t + 1) * dim + r];
        }
    }
    g
}

/// Largest |∇_X L| over all `(i, t)` of `cases` random instances, at
/// multipliers from the component backward recursion and random controls.
pub fn component_stationarity(seed: u64, cases: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let (n, horizon) = shape(case);
        let (cfg, w, it) = random_iterate(&mut rng, n, horizon);
        for i in 0..n {
            let u: Vec<f64> = (0..horizon).map(|_| rng.random::<f64>()).collect();
            let lam = component_multiplier_backward(i, &u, &it, &w, &cfg).unwrap();
            let coord = Coordination::new(&it, &w, &cfg, Exec::Sequential).unwrap();
            let sp = ComponentSubproblem::new(i, &it, &coord, &w, &cfg).unwrap();
            let x = &sp.paths(&u)[0];
            for t in 0..=horizon {
                let g = lagrangian_grad_x(i, t, x, &u, &lam[0], &it, &w[0], &cfg);
                worst = g.iter().fold(worst, |m, v| m.max(v.abs()));
            }
        }
    }
    worst
}

/// Largest |∂L/∂S_t| at the stock subproblem solution and its multipliers.
pub fn stock_stationarity(seed: u64, cases: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let (n, horizon) = shape(case);
        let (cfg, w, it) = random_iterate(&mut rng, n, horizon);
        let (dim, alpha, gs) = (cfg.state_dim(), it.schedule.alpha, it.schedule.gamma_s);
        let s_star = solve_stock_subproblem(&it, &cfg).remove(0);
        let lam = stock_multiplier_backward(0, &s_star, &it, &w[0], &cfg).unwrap();
        let sbar = &it.bars[0].s;
        for t in 0..=horizon {
            let mut g = gs * (s_star[t] - sbar[t]) + lam[t];
            if t < horizon {
                let layer = it.bars[0].layer(t, n, dim);
                let ubar: Vec<f64> = (0..n).map(|j| it.u.get(j, t)).collect();
                let wt: Vec<f64> = (0..n).map(|j| w[0].get(j, t)).collect();
                let part = relaxed_partials(layer, sbar[t], &ubar, &wt, alpha, &cfg);
                for i in 0..n {
                    let li = it.multipliers.comp_at(0, t + 1, i);
                    for r in 0..dim {
                        g -= part.components[i].ds[r] * li[r];
                    }
                }
                g -= stock_partials(layer, s_star[t], alpha, &cfg).ds * lam[t + 1];
            }
            worst = worst.max(g.abs());
        }
    }
    worst
}

pub struct GradientSummary {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest `|adjoint − fd| / max(|fd|, 1e-2)`.
    pub worst: f64,
}

/// Adjoint reduced gradient against central differences (step 1e-5) at
/// `points` random controls whose ±h stencils stay on one affine piece.
pub fn reduced_gradient(seed: u64, points: usize) -> GradientSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    let (mut accepted, mut rejected) = (0, 0);
    let mut worst = 0.0f64;
    while accepted < points && rejected < 100 * points {
        let (n, horizon) = shape(accepted);
        let (cfg, w, it) = random_iterate(&mut rng, n, horizon);
        let i = rng.random_range(0..n);
        let coord = Coordination::new(&it, &w, &cfg, Exec::Sequential).unwrap();
        let sp = ComponentSubproblem::new(i, &it, &coord, &w, &cfg).unwrap();
        let u: Vec<f64> = (0..horizon).map(|_| rng.random_range(0.05..0.95)).collect();
        let sig = |u: &[f64]| {
            let mut p = Probe::new(it.schedule.alpha);
            let v = sp.objective_with(&mut p, u);
            (v, p.signature)
        };
        let (_, s0) = sig(&u);
        // The start state sits on breakpoints that do not move with `u`, so
        // smoothness is judged by the signature staying put under ±h.
        let mut fd = Vec::with_capacity(horizon);
        let mut smooth = true;
        for t in 0..horizon {
            let (mut up, mut um) = (u.clone(), u.clone());
            up[t] += h;
            um[t] -= h;
            let ((fp, sp_), (fm, sm)) = (sig(&up), sig(&um));
            if sp_ != s0 || sm != s0 {
                smooth = false;
                break;
            }
            fd.push((fp - fm) / (2.0 * h));
        }
        if !smooth {
            rejected += 1;
            continue;
        }
        let g = sp.gradient(&u);
        for t in 0..horizon {
            worst = worst.max((g[t] - fd[t]).abs() / fd[t].abs().max(1e-2));
        }
        accepted += 1;
    }
    GradientSummary { accepted, rejected, worst }
}
