#![allow(clippy::needless_range_loop)]

use maintopt::relax::{
    relaxed_partials, step_component_relaxed_with, step_stock_relaxed_with, Probe,
};
use maintopt::sysmodel::{ComponentParams, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-6;

struct Point {
    cfg: SystemConfig,
    alpha: f64,
    layer: Vec<f64>,
    s: f64,
    u: Vec<f64>,
    w: Vec<f64>,
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    let n = rng.random_range(1..=4);
    let mut cfg = SystemConfig::small().with_n(n);
    cfg.supply_delay = rng.random_range(1..=3);
    for c in cfg.components.iter_mut() {
        *c = ComponentParams {
            c_p: 50.0,
            c_c: 200.0,
            weibull_shape: rng.random_range(1.5..4.0),
            weibull_scale: rng.random_range(4.0..15.0),
        };
    }
    let dim = cfg.state_dim();
    let mut layer = vec![0.0; n * dim];
    for c in layer.chunks_exact_mut(dim) {
        c[0] = rng.random_range(-0.3..1.3);
        c[1] = rng.random_range(0.1..12.0);
        for p in &mut c[2..] {
            *p = rng.random_range(-1.5..3.0);
        }
    }
    Point {
        alpha: rng.random_range(0.5..5.0),
        s: rng.random_range(-0.5..3.0),
        u: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
        w: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
        layer,
        cfg,
    }
}

/// One relaxed system step; returns `(layer', S')` flattened and the piece
/// signature of every indicator touched.
fn step(p: &Point, layer: &[f64], s: f64, u: &[f64]) -> (Vec<f64>, Vec<u8>) {
    let cfg = &p.cfg;
    let dim = cfg.state_dim();
    let mut ev = Probe::new(p.alpha);
    let mut out = vec![0.0; layer.len() + 1];
    let mut bb = 0.0;
    for i in 0..cfg.n {
        let x = &layer[i * dim..(i + 1) * dim];
        let o = &mut out[i * dim..(i + 1) * dim];
        bb += step_component_relaxed_with(&mut ev, bb, x, s, u[i], p.w[i], &cfg.components[i], cfg, o);
    }
    out[layer.len()] = step_stock_relaxed_with(&mut ev, layer, s, bb, cfg);
    (out, ev.signature)
}

/// Inputs are the layer, then `S`, then the controls.
fn perturbed(p: &Point, col: usize, h: f64) -> (Vec<f64>, Vec<u8>) {
    let (mut layer, mut s, mut u) = (p.layer.clone(), p.s, p.u.clone());
    let nl = layer.len();
    if col < nl {
        layer[col] += h;
    } else if col == nl {
        s += h;
    } else {
        u[col - nl - 1] += h;
    }
    step(p, &layer, s, &u)
}

/// Analytic Jacobian, rows `(layer', S')`, columns `(layer, S, u)`.
fn analytic(p: &Point) -> Vec<Vec<f64>> {
    let cfg = &p.cfg;
    let (n, dim) = (cfg.n, cfg.state_dim());
    let part = relaxed_partials(&p.layer, p.s, &p.u, &p.w, p.alpha, cfg);
    let rows = n * dim + 1;
    let cols = n * dim + 1 + n;
    let mut m = vec![vec![0.0; cols]; rows];
    for i in 0..n {
        for j in 0..n {
            let b = part.block(i, j);
            for r in 0..dim {
                for k in 0..dim {
                    m[i * dim + r][j * dim + k] = b[r * dim + k];
                }
            }
        }
        let jac = &part.components[i];
        for r in 0..dim {
            m[i * dim + r][n * dim] = jac.ds[r];
            m[i * dim + r][n * dim + 1 + i] = jac.du[r];
        }
    }
    for c in 0..n * dim {
        m[n * dim][c] = part.stock.dx[c];
    }
    m[n * dim][n * dim] = part.stock.ds;
    m
}

/// Outcome of the central-difference comparison.
pub struct FdSummary {
    pub accepted: usize,
    /// Points where a ±h stencil crossed a kink.
    pub rejected: usize,
    /// Largest absolute gap between an analytic and a numeric entry.
    pub worst: f64,
}

/// Compares every Jacobian block with central differences (step 1e-6) at
/// `points` random evaluation points away from kinks.
pub fn check_relaxed_partials(seed: u64, points: usize) -> FdSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut worst = 0.0f64;
    while accepted < points {
        let p = random_point(&mut rng);
        let (_, sig) = step(&p, &p.layer, p.s, &p.u);
        let cols = p.layer.len() + 1 + p.cfg.n;
        let mut fd = Vec::with_capacity(cols);
        let mut smooth = sig.iter().all(|&c| c % 2 == 0);
        for col in 0..cols {
            let (plus, sp) = perturbed(&p, col, H);
            let (minus, sm) = perturbed(&p, col, -H);
            if sp != sig || sm != sig {
                smooth = false;
                break;
            }
            fd.push(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * H)).collect::<Vec<_>>());
        }
        if !smooth {
            rejected += 1;
            continue;
        }
        let m = analytic(&p);
        for (col, column) in fd.iter().enumerate() {
            for (row, &v) in column.iter().enumerate() {
                worst = worst.max((v - m[row][col]).abs());
            }
        }
        accepted += 1;
    }
    FdSummary { accepted, rejected, worst }
}
