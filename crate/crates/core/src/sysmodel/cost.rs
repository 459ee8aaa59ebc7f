use serde::{Deserialize, Serialize};

use super::types::{Strategy, Trajectory};
use super::SystemConfig;

/// Discount factor `(1 + τ)^−t`.
#[inline]
pub fn discount(tau: f64, t: usize) -> f64 {
    (1.0 + tau).powi(-(t as i32))
}

/// Discounted costs of one trajectory, in k€.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub pm: f64,
    pub cm: f64,
    pub fo: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub(crate) fn from_parts(pm: f64, cm: f64, fo: f64) -> Self {
        CostBreakdown {
            pm,
            cm,
            fo,
            total: pm + cm + fo,
        }
    }
}

/// PM cost is quadratic in the control, CM cost is charged when a component
/// is found in `(E, A) = (0, 0)`, and the forced-outage cost is charged at
/// most once per step.
///
/// The summation order (time outer, component inner) is shared with the
/// relaxed costs so that both agree bitwise on integer trajectories.
pub fn total_cost(tr: &Trajectory, strategy: &Strategy, cfg: &SystemConfig) -> CostBreakdown {
    let (mut pm, mut cm, mut fo) = (0.0, 0.0, 0.0);
    for t in 0..=cfg.horizon {
        let beta = discount(cfg.tau, t);
        let mut waiting = false;
        for i in 0..cfg.n {
            let c = &cfg.components[i];
            if t < cfg.horizon {
                let u = strategy.get(i, t);
                pm += beta * c.c_p * u * u;
            }
            let (e, a) = (tr.regime(t, i), tr.age(t, i));
            if e == 0.0 && a == 0.0 {
                cm += beta * c.c_c;
            }
            waiting |= e == 0.0 && a > 0.0;
        }
        if waiting {
            fo += beta * cfg.c_f;
        }
    }
    CostBreakdown::from_parts(pm, cm, fo)
}
