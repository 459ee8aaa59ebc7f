//! Exact system model: configuration, failure law, integer-regime dynamics,
//! trajectories and costs.
//!
//! Component state is stored packed as `[E, A, P^1, .., P^D]` so that the
//! exact and relaxed kernels share one layout (see [`SystemConfig::state_dim`]).

mod config;
mod cost;
mod dynamics;
mod failure;
mod types;

pub use config::{ComponentParams, SystemConfig};
pub use cost::{discount, total_cost, CostBreakdown};
pub use dynamics::{
    simulate, simulate_into, spare_available, step_component, step_component_packed, step_stock,
    step_stock_packed, StepEvents,
};
pub use failure::{
    failure_probability, failure_probability_derivative, mttf, mttf_monte_carlo,
    weibull_cdf,
};
pub(crate) use failure::fail_prob;
pub use types::{ComponentState, Scenario, Strategy, SystemState, Trajectory};
