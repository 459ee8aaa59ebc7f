//! Scenario sets, the sample-average objective, strategy projection, the
//! validation report and the direct-search reference arm.
//!
//! Validation sets can hold 10⁵ scenarios, so [`ScenarioSet`] generates each
//! scenario on demand from `(seed, domain, index)` and the report streams over
//! them in chunks.

mod direct;
mod report;
mod saa;
mod scenarios;

pub use direct::optimize_direct;
pub use report::{
    evaluate_strategy, nearest_rank, EvaluationReport, ForcedOutageStats, Histogram, Quantile,
    QUANTILE_LEVELS,
};
pub use saa::{project_strategy, saa_objective, scenario_cost, Dynamics, SaaEvaluator};
pub use scenarios::{generate_scenarios, ScenarioDomain, ScenarioSet, ScenarioSource};
