//! Piecewise-linear relaxation of the system.
//!
//! Indicators are replaced by ramps of width `1/(2α)`, complementary
//! conditions are always written as `1 − I` of a single relaxed indicator,
//! and every kernel is generic over [`IndicatorEval`] so the same code path
//! can be instrumented (see [`Probe`]).

mod cost;
mod dynamics;
mod indicator;
mod partials;

pub use cost::{
    fo_cost_gradient, maintenance_cost_gradient, relaxed_costs, relaxed_fo_cost,
    relaxed_maintenance_cost, relaxed_total_cost, relaxed_total_cost_with,
};
pub use dynamics::{
    simulate_component_relaxed, simulate_relaxed, simulate_relaxed_with, step_component_relaxed,
    step_component_relaxed_with, step_stock_relaxed, step_stock_relaxed_with,
};
pub use indicator::{
    relaxed_indicator, relaxed_indicator_derivative, IndicatorEval, Probe, Relaxed,
    SetDescriptor,
};
pub use partials::{
    component_partials, component_partials_into, relaxed_partials, stock_partials,
    ComponentJacobian, RelaxedPartials, StockJacobian,
};

use crate::error::{Error, Result};

/// The relaxation stiffness `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationContext {
    pub alpha: f64,
}

impl RelaxationContext {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(RelaxationContext { alpha })
    }

    /// Half-width of the ramp, `1/(2α)`.
    pub fn band(&self) -> f64 {
        0.5 / self.alpha
    }
}
