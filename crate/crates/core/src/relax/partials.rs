use crate::sysmodel::{fail_prob, failure_probability_derivative, ComponentParams, SystemConfig};

use super::indicator::{relaxed_indicator as ind, relaxed_indicator_derivative as dind, SetDescriptor};

use SetDescriptor::{NonNeg, Singleton, StrictPos};

/// Partial derivatives of the relaxed component step `x' = f(x, bb, S, u)`.
///
/// `bb = Σ_{j<i} I⁰(E_j)` is the only channel through which lower-index
/// components act, so `∂f_i/∂X_j = dbb · I⁰'(E_j) e_Eᵀ` for `j < i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentJacobian {
    pub dim: usize,
    /// `∂x'_r/∂x_c` stored row-major at `r * dim + c`.
    pub dx: Vec<f64>,
    pub dbb: Vec<f64>,
    pub ds: Vec<f64>,
    pub du: Vec<f64>,
}

impl ComponentJacobian {
    pub fn new(dim: usize) -> Self {
        ComponentJacobian {
            dim,
            dx: vec![0.0; dim * dim],
            dbb: vec![0.0; dim],
            ds: vec![0.0; dim],
            du: vec![0.0; dim],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.dx[r * self.dim + c]
    }

    /// `out = (∂f/∂x)ᵀ v`.
    pub fn dx_t_mul(&self, v: &[f64], out: &mut [f64]) {
        let d = self.dim;
        out[..d].fill(0.0);
        for r in 0..d {
            let vr = v[r];
            if vr == 0.0 {
                continue;
            }
            let row = &self.dx[r * d..(r + 1) * d];
            for c in 0..d {
                out[c] += row[c] * vr;
            }
        }
    }

    pub fn dbb_dot(&self, v: &[f64]) -> f64 {
        dot(&self.dbb, v)
    }

    pub fn ds_dot(&self, v: &[f64]) -> f64 {
        dot(&self.ds, v)
    }

    pub fn du_dot(&self, v: &[f64]) -> f64 {
        dot(&self.du, v)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Partial derivatives of the relaxed stock step
/// `S' = S + Σ_i Σ_d I^{D−1}(P_i^d) − min(S, Σ_i I⁰(E_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct StockJacobian {
    pub ds: f64,
    /// `∂S'/∂x_i` for every component, packed like a state layer.
    pub dx: Vec<f64>,
}

/// All Jacobian blocks of one system step.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedPartials {
    /// `components[i]` holds `∂f_i/∂(x_i, bb_i, S, u_i)`.
    pub components: Vec<ComponentJacobian>,
    /// `I⁰'(E_j)`: multiply `components[i].dbb` by `dz[j]` for `∂f_i/∂E_j`, `j < i`.
    pub dz: Vec<f64>,
    pub stock: StockJacobian,
}

impl RelaxedPartials {
    /// Dense `∂f_i/∂x_j` (row-major `dim × dim`) for any `j ≤ i`, zero for `j > i`.
    pub fn block(&self, i: usize, j: usize) -> Vec<f64> {
        let jac = &self.components[i];
        let d = jac.dim;
        if j == i {
            return jac.dx.clone();
        }
        let mut m = vec![0.0; d * d];
        if j < i {
            for r in 0..d {
                m[r * d] = jac.dbb[r] * self.dz[j];
            }
        }
        m
    }
}

/// Fill `jac` with the partials of the relaxed component step at the given
/// point. Uses the convention that kinks have zero derivative.
#[allow(clippy::too_many_arguments)]
pub fn component_partials_into(
    alpha: f64,
    bb: f64,
    x: &[f64],
    s: f64,
    u: f64,
    w: f64,
    comp: &ComponentParams,
    cfg: &SystemConfig,
    jac: &mut ComponentJacobian,
) {
    let dim = jac.dim;
    let (e, a) = (x[0], x[1]);
    let p = &x[2..];
    let delta = cfg.delta_default;
    jac.dx.fill(0.0);
    jac.dbb.fill(0.0);
    jac.ds.fill(0.0);
    jac.du.fill(0.0);

    let z = ind(Singleton(0.0), e, alpha);
    let z1 = dind(Singleton(0.0), e, alpha);
    let b = bb + z;
    let av = ind(NonNeg, s - b, alpha);
    let av1 = dind(NonNeg, s - b, alpha);
    let na = ind(StrictPos, b - s, alpha);
    let na1 = dind(StrictPos, b - s, alpha);
    let pm = ind(NonNeg, u - cfg.nu, alpha);
    let pm1 = dind(NonNeg, u - cfg.nu, alpha);
    let pf = fail_prob(comp.weibull_shape, comp.weibull_scale, a, cfg.dt);
    let pf1 = failure_probability_derivative(comp.weibull_shape, comp.weibull_scale, a, cfg.dt);
    let nf = ind(NonNeg, w - pf, alpha);
    let nf1 = dind(NonNeg, w - pf, alpha);
    let h = 1.0 - z;
    let g = pm + nf * (1.0 - pm);

    // d(av), d(na) w.r.t. E, bb, S
    let (av_e, av_b, av_s) = (-av1 * z1, -av1, av1);
    let (na_e, na_b, na_s) = (na1 * z1, na1, -na1);
    let nf_a = -nf1 * pf1;
    let g_u = pm1 * (1.0 - nf);
    let g_a = nf_a * (1.0 - pm);

    // Regime.
    let e1 = av * z + g * h;
    let de1_e = av_e * z + av * z1 - g * z1;
    let de1_b = av_b * z;
    let de1_s = av_s * z;
    let de1_u = g_u * h;
    let de1_a = g_a * h;

    // Age: A' = (A+1) m + (1 − na) z + r pm h.
    let m = na * z + nf * (1.0 - pm) * h;
    let r = (1.0 - u) * a + 1.0;
    let m_e = na_e * z + na * z1 - nf * (1.0 - pm) * z1;
    let m_b = na_b * z;
    let m_s = na_s * z;
    let m_u = -nf * pm1 * h;
    let m_a = nf_a * (1.0 - pm) * h;
    let da1_e = (a + 1.0) * m_e - na_e * z + (1.0 - na) * z1 - r * pm * z1;
    let da1_b = (a + 1.0) * m_b - na_b * z;
    let da1_s = (a + 1.0) * m_s - na_s * z;
    let da1_u = (a + 1.0) * m_u - a * pm * h + r * pm1 * h;
    let da1_a = m + (a + 1.0) * m_a + (1.0 - u) * pm * h;

    jac.dx[0] = de1_e;
    jac.dx[1] = de1_a;
    jac.dbb[0] = de1_b;
    jac.ds[0] = de1_s;
    jac.du[0] = de1_u;
    jac.dx[dim] = da1_e;
    jac.dx[dim + 1] = da1_a;
    jac.dbb[1] = da1_b;
    jac.ds[1] = da1_s;
    jac.du[1] = da1_u;

    // Failure weight fail = I¹(E) I⁰(E').
    let y1 = ind(Singleton(1.0), e, alpha);
    let y11 = dind(Singleton(1.0), e, alpha);
    let q = ind(Singleton(0.0), e1, alpha);
    let q1 = dind(Singleton(0.0), e1, alpha);
    let fail = y1 * q;
    let f_e = y11 * q + y1 * q1 * de1_e;
    let f_a = y1 * q1 * de1_a;
    let f_b = y1 * q1 * de1_b;
    let f_s = y1 * q1 * de1_s;
    let f_u = y1 * q1 * de1_u;

    let dd = p.len();
    let rr = |d: usize| ind(Singleton(delta), p[d], alpha);
    let rr1 = |d: usize| dind(Singleton(delta), p[d], alpha);
    let r_last = rr(dd - 1);
    let r_last1 = rr1(dd - 1);
    for d in 0..dd {
        let row = (2 + d) * dim;
        let rd = rr(d);
        let rd1 = rr1(d);
        let keep = (p[d] + 1.0) * (1.0 - rd) + delta * rd;
        let mut fill = (p[d] + 1.0) * (1.0 - rd) * r_last;
        if d >= 1 {
            fill += delta * rr(d - 1);
        }
        if d + 1 < dd {
            fill += (p[d + 1] + 1.0) * (1.0 - r_last);
        }
        let gap = fill - keep;
        jac.dx[row] = gap * f_e;
        jac.dx[row + 1] = gap * f_a;
        jac.dbb[2 + d] = gap * f_b;
        jac.ds[2 + d] = gap * f_s;
        jac.du[2 + d] = gap * f_u;

        // keep part
        let keep_d = (1.0 - rd) - (p[d] + 1.0) * rd1 + delta * rd1;
        jac.dx[row + 2 + d] += keep_d * (1.0 - fail);
        // fill part
        jac.dx[row + 2 + d] += ((1.0 - rd) * r_last - (p[d] + 1.0) * rd1 * r_last) * fail;
        jac.dx[row + 2 + dd - 1] += (p[d] + 1.0) * (1.0 - rd) * r_last1 * fail;
        if d >= 1 {
            jac.dx[row + 2 + d - 1] += delta * rr1(d - 1) * fail;
        }
        if d + 1 < dd {
            jac.dx[row + 2 + d + 1] += (1.0 - r_last) * fail;
            jac.dx[row + 2 + dd - 1] += -(p[d + 1] + 1.0) * r_last1 * fail;
        }
    }
}

/// Allocating convenience wrapper around [`component_partials_into`].
#[allow(clippy::too_many_arguments)]
pub fn component_partials(
    alpha: f64,
    bb: f64,
    x: &[f64],
    s: f64,
    u: f64,
    w: f64,
    comp: &ComponentParams,
    cfg: &SystemConfig,
) -> ComponentJacobian {
    let mut j = ComponentJacobian::new(cfg.state_dim());
    component_partials_into(alpha, bb, x, s, u, w, comp, cfg, &mut j);
    j
}

/// Partials of the relaxed stock step over a layer of packed states. At the
/// tie `S = Σ I⁰(E)` the `S` branch of the `min` is taken.
pub fn stock_partials(layer: &[f64], s: f64, alpha: f64, cfg: &SystemConfig) -> StockJacobian {
    let dim = cfg.state_dim();
    let due = (cfg.supply_delay - 1) as f64;
    let zsum: f64 = layer
        .chunks_exact(dim)
        .map(|c| ind(Singleton(0.0), c[0], alpha))
        .sum();
    let s_branch = s <= zsum;
    let mut dx = vec![0.0; layer.len()];
    for (c, o) in layer.chunks_exact(dim).zip(dx.chunks_exact_mut(dim)) {
        if !s_branch {
            o[0] = -dind(Singleton(0.0), c[0], alpha);
        }
        for d in 2..dim {
            o[d] = dind(Singleton(due), c[d], alpha);
        }
    }
    StockJacobian {
        ds: if s_branch { 0.0 } else { 1.0 },
        dx,
    }
}

/// Every Jacobian block of one relaxed system step at `(layer, s, u_t, w_t)`.
pub fn relaxed_partials(
    layer: &[f64],
    s: f64,
    u_t: &[f64],
    w_t: &[f64],
    alpha: f64,
    cfg: &SystemConfig,
) -> RelaxedPartials {
    let dim = cfg.state_dim();
    let mut bb = 0.0;
    let mut comps = Vec::with_capacity(cfg.n);
    let mut dz = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let x = &layer[i * dim..(i + 1) * dim];
        comps.push(component_partials(alpha, bb, x, s, u_t[i], w_t[i], &cfg.components[i], cfg));
        dz.push(dind(Singleton(0.0), x[0], alpha));
        bb += ind(Singleton(0.0), x[0], alpha);
    }
    RelaxedPartials {
        components: comps,
        dz,
        stock: stock_partials(layer, s, alpha, cfg),
    }
}
