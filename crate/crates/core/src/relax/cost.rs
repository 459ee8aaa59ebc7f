use crate::sysmodel::{discount, ComponentParams, CostBreakdown, Strategy, SystemConfig, Trajectory};

use super::indicator::{
    relaxed_indicator as ind, relaxed_indicator_derivative as dind, IndicatorEval, Relaxed,
    SetDescriptor,
};

use SetDescriptor::{Singleton, StrictPos};

/// Relaxed maintenance cost of one component at `t`: the PM term (only when a
/// control is given, i.e. `t < T`) plus the relaxed CM term.
pub fn relaxed_maintenance_cost(
    x: &[f64],
    u: Option<f64>,
    t: usize,
    alpha: f64,
    comp: &ComponentParams,
    cfg: &SystemConfig,
) -> f64 {
    let beta = discount(cfg.tau, t);
    let pm = u.map_or(0.0, |u| beta * comp.c_p * u * u);
    pm + beta * comp.c_c * ind(Singleton(0.0), x[0], alpha) * ind(Singleton(0.0), x[1], alpha)
}

/// Relaxed forced-outage cost at `t` over a layer of packed states.
pub fn relaxed_fo_cost(layer: &[f64], t: usize, alpha: f64, cfg: &SystemConfig) -> f64 {
    let y: f64 = layer
        .chunks_exact(cfg.state_dim())
        .map(|c| ind(Singleton(0.0), c[0], alpha) * ind(StrictPos, c[1], alpha))
        .sum();
    discount(cfg.tau, t) * cfg.c_f * y.min(1.0)
}

/// Per-step relaxed cost of the whole system at `t` (maintenance of all
/// components plus forced outage).
pub fn relaxed_costs(layer: &[f64], u_t: Option<&[f64]>, t: usize, alpha: f64, cfg: &SystemConfig) -> f64 {
    let dim = cfg.state_dim();
    let m: f64 = (0..cfg.n)
        .map(|i| {
            relaxed_maintenance_cost(
                &layer[i * dim..(i + 1) * dim],
                u_t.map(|u| u[i]),
                t,
                alpha,
                &cfg.components[i],
                cfg,
            )
        })
        .sum();
    m + relaxed_fo_cost(layer, t, alpha, cfg)
}

/// Total relaxed cost of a trajectory. Same summation order as
/// [`crate::sysmodel::total_cost`].
pub fn relaxed_total_cost_with<I: IndicatorEval>(
    ev: &mut I,
    tr: &Trajectory,
    strategy: &Strategy,
    cfg: &SystemConfig,
) -> CostBreakdown {
    let (mut pm, mut cm, mut fo) = (0.0, 0.0, 0.0);
    for t in 0..=cfg.horizon {
        let beta = discount(cfg.tau, t);
        let mut y = 0.0;
        for i in 0..cfg.n {
            let c = &cfg.components[i];
            if t < cfg.horizon {
                let u = strategy.get(i, t);
                pm += beta * c.c_p * u * u;
            }
            let (e, a) = (tr.regime(t, i), tr.age(t, i));
            let ze = ev.ind(Singleton(0.0), e);
            cm += beta * c.c_c * ze * ev.ind(Singleton(0.0), a);
            y += ze * ev.ind(StrictPos, a);
        }
        fo += beta * cfg.c_f * ev.min(1.0, y);
    }
    CostBreakdown::from_parts(pm, cm, fo)
}

pub fn relaxed_total_cost(
    tr: &Trajectory,
    strategy: &Strategy,
    alpha: f64,
    cfg: &SystemConfig,
) -> CostBreakdown {
    relaxed_total_cost_with(&mut Relaxed { alpha }, tr, strategy, cfg)
}

/// Gradient of the relaxed maintenance cost at `t` w.r.t. `(E, A)` and the
/// control. Returns `(d/dE, d/dA, d/du)`; `d/du` is 0 when `u` is `None`.
pub fn maintenance_cost_gradient(
    x: &[f64],
    u: Option<f64>,
    t: usize,
    alpha: f64,
    comp: &ComponentParams,
    cfg: &SystemConfig,
) -> (f64, f64, f64) {
    let k = discount(cfg.tau, t) * comp.c_c;
    let (ze, za) = (ind(Singleton(0.0), x[0], alpha), ind(Singleton(0.0), x[1], alpha));
    let de = k * dind(Singleton(0.0), x[0], alpha) * za;
    let da = k * ze * dind(Singleton(0.0), x[1], alpha);
    let du = u.map_or(0.0, |u| 2.0 * discount(cfg.tau, t) * comp.c_p * u);
    (de, da, du)
}

/// Gradient of `β C^F min(1, others + I⁰(E) I⁺*(A))` w.r.t. the `(E, A)` of one
/// component, where `others` is the frozen contribution of the rest of the
/// fleet. At the tie `Y = 1` the constant branch is taken.
pub fn fo_cost_gradient(x: &[f64], others: f64, t: usize, alpha: f64, cfg: &SystemConfig) -> (f64, f64) {
    let ze = ind(Singleton(0.0), x[0], alpha);
    let sa = ind(StrictPos, x[1], alpha);
    if others + ze * sa >= 1.0 {
        return (0.0, 0.0);
    }
    let k = discount(cfg.tau, t) * cfg.c_f;
    (
        k * dind(Singleton(0.0), x[0], alpha) * sa,
        k * ze * dind(StrictPos, x[1], alpha),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::Probe;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn documented_values() {
        let c = SystemConfig::small();
        let comp = &c.components[0];
        assert_eq!(relaxed_maintenance_cost(&[0.0, 0.0, -1.0, -1.0], None, 0, 1e6, comp, &c), 200.0);
        assert_eq!(relaxed_maintenance_cost(&[0.5, 0.0, -1.0, -1.0], None, 0, 2.0, comp, &c), 0.0);
        let healthy = [1.0, 3.0, -1.0, -1.0].repeat(10);
        assert_eq!(relaxed_fo_cost(&healthy, 0, 2.0, &c), 0.0);
        assert_eq!(relaxed_maintenance_cost(&[1.0, 3.0, -1.0, -1.0], Some(1.0), 1, 2.0, comp, &c), 50.0 / 1.08);
        let mut two = healthy.clone();
        two[4] = 0.0;
        two[2 * 4] = 0.0;
        assert_eq!(relaxed_fo_cost(&two, 0, 1.0, &c), 10000.0);
    }

    fn probe_sig(f: impl Fn(&mut Probe)) -> Vec<u8> {
        let mut p = Probe::new(1.0);
        f(&mut p);
        p.signature
    }

    proptest! {
        #[test]
        fn gradients_match_finite_differences(e in 0.0f64..1.0, a in 0.0f64..0.6,
                                              others in 0.0f64..1.2, t in 0usize..5,
                                              alpha in 1.0f64..4.0, u in 0.0f64..1.0) {
            let c = SystemConfig::small();
            let comp = &c.components[0];
            let h = 1e-6;
            let sig = |e: f64, a: f64| probe_sig(|p| {
                p.alpha = alpha;
                p.ind(Singleton(0.0), e);
                p.ind(Singleton(0.0), a);
                p.ind(StrictPos, a);
                let y = others + relaxed_indicator_pair(e, a, alpha);
                p.min(1.0, y);
            });
            prop_assume!(sig(e - h, a) == sig(e + h, a) && sig(e, a - h) == sig(e, a + h));
            let m = |e: f64, a: f64| relaxed_maintenance_cost(&[e, a, -1.0, -1.0], Some(u), t, alpha, comp, &c);
            let fo = |e: f64, a: f64| {
                let y = others + relaxed_indicator_pair(e, a, alpha);
                discount(c.tau, t) * c.c_f * y.min(1.0)
            };
            let (de, da, du) = maintenance_cost_gradient(&[e, a], Some(u), t, alpha, comp, &c);
            assert_abs_diff_eq!(de, (m(e + h, a) - m(e - h, a)) / (2.0 * h), epsilon = 1e-6 * (1.0 + de.abs()));
            assert_abs_diff_eq!(da, (m(e, a + h) - m(e, a - h)) / (2.0 * h), epsilon = 1e-6 * (1.0 + da.abs()));
            let mu = |u: f64| relaxed_maintenance_cost(&[e, a], Some(u), t, alpha, comp, &c);
            assert_abs_diff_eq!(du, (mu(u + h) - mu(u - h)) / (2.0 * h), epsilon = 1e-5);
            let (fe, fa) = fo_cost_gradient(&[e, a], others, t, alpha, &c);
            assert_abs_diff_eq!(fe, (fo(e + h, a) - fo(e - h, a)) / (2.0 * h), epsilon = 1e-6 * (1.0 + fe.abs()));
            assert_abs_diff_eq!(fa, (fo(e, a + h) - fo(e, a - h)) / (2.0 * h), epsilon = 1e-6 * (1.0 + fa.abs()));
        }
    }

    fn relaxed_indicator_pair(e: f64, a: f64, alpha: f64) -> f64 {
        ind(Singleton(0.0), e, alpha) * ind(StrictPos, a, alpha)
    }
}
