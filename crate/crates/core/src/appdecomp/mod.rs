//! Decomposition of the relaxed problem by component with the auxiliary
//! problem principle.
//!
//! At each iteration every component solves a small problem over its own
//! `T` controls. The other components, the stock and the multipliers are
//! frozen at the previous iterate (the "bars"). The stock subproblem is then
//! solved on the fresh component solutions. Multipliers come from adjoint
//! recursions along the solutions.
//!
//! Sign convention: constraints are written `X_{t+1} − f(X_t, ..) = 0`, so a
//! transposed Jacobian of `f` enters the recursions with a plus sign.

mod driver;
mod params;
mod state;
mod stock;
mod subproblem;

pub use driver::{app_fixed_point, app_iteration, subproblem_seed, AppOutcome, IterationRecord};
pub use params::{update_schedules, APPParams, Schedule, PARAM_BOUNDS, PARAM_NAMES};
pub use state::{Iterate, MultiplierSet, ScenarioBars};
pub use stock::{solve_stock_subproblem, stock_multiplier_backward};
pub use subproblem::{
    component_multiplier_backward, component_subproblem_objective, solve_component_subproblem,
    ComponentSolution, ComponentSubproblem, Coordination, ScenarioCoupling,
};
