use crate::dsearch::{minimize, SearchBudget, SearchResult};
use crate::error::Result;
use crate::sysmodel::{Scenario, Strategy, SystemConfig};

use super::saa::{Dynamics, SaaEvaluator};

/// Reference arm: the blackbox solver applied to the full `n·T` control
/// vector of the SAA problem, from `start`.
pub fn optimize_direct(
    cfg: &SystemConfig,
    scenarios: &[Scenario],
    mode: Dynamics,
    start: &Strategy,
    budget: &SearchBudget,
) -> Result<(Strategy, SearchResult)> {
    start.check_dims(cfg)?;
    let mut ev = SaaEvaluator::new(cfg, scenarios, mode)?;
    let bounds = vec![(0.0, 1.0); cfg.n * cfg.horizon];
    let res = minimize(|u| ev.eval_flat(u), start.as_slice(), &bounds, budget)?;
    let strategy = Strategy::from_vec(cfg.n, cfg.horizon, res.x.clone())?;
    Ok((strategy, res))
}
