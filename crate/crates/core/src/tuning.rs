//! Latin hypercube designs over the APP parameter box and the tuner that
//! ranks them on a shared validation set.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::appdecomp::{app_fixed_point, APPParams, PARAM_BOUNDS};
use crate::error::{Error, Result};
use crate::evalharness::{evaluate_strategy, ScenarioSource};
use crate::exec::Exec;
use crate::sysmodel::{Scenario, Strategy, SystemConfig};

/// A stratified design: `count` points in the box `bounds`, with exactly one
/// point per equal-width stratum along each coordinate.
///
/// With `restarts > 1` the design with the largest minimum pairwise distance
/// (in box-normalised coordinates) is kept.
pub fn lhs_sample(bounds: &[(f64, f64)], count: usize, seed: u64, restarts: usize) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::Config("LHS count must be at least 1".into()));
    }
    for (d, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("invalid bounds [{lo}, {hi}] on coordinate {d}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for _ in 0..restarts.max(1) {
        let unit = unit_design(bounds.len(), count, &mut rng);
        let score = min_distance(&unit);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, unit));
        }
    }
    let unit = best.expect("at least one restart").1;
    Ok(unit
        .into_iter()
        .map(|p| {
            p.iter()
                .zip(bounds)
                .map(|(&z, &(lo, hi))| (lo + z * (hi - lo)).clamp(lo, hi))
                .collect()
        })
        .collect())
}

fn unit_design(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; dim]; count];
    let mut perm: Vec<usize> = (0..count).collect();
    for d in 0..dim {
        perm.shuffle(rng);
        for (j, p) in pts.iter_mut().enumerate() {
            p[d] = (perm[j] as f64 + rng.random::<f64>()) / count as f64;
        }
    }
    pts
}

fn min_distance(pts: &[Vec<f64>]) -> f64 {
    let mut m = f64::INFINITY;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let d: f64 = pts[a].iter().zip(&pts[b]).map(|(x, y)| (x - y) * (x - y)).sum();
            m = m.min(d);
        }
    }
    m
}

/// LHS over [`PARAM_BOUNDS`], turned into parameter sets.
pub fn lhs_params(count: usize, seed: u64, restarts: usize, iterations: usize, budget: usize) -> Result<Vec<APPParams>> {
    Ok(lhs_sample(&PARAM_BOUNDS, count, seed, restarts)?
        .iter()
        .map(|v| APPParams::from_vector(v[..].try_into().expect("six coordinates"), iterations, budget))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    /// Position of the sample in the design.
    pub sample: usize,
    pub params: APPParams,
    /// Mean exact-dynamics validation cost of the projected strategy.
    pub mean_cost: f64,
}

#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub best: APPParams,
    /// Sorted by mean cost, ties by sample index.
    pub leaderboard: Vec<LeaderboardEntry>,
    /// Final strategy of each sample, in design order.
    pub strategies: Vec<Strategy>,
}

/// Runs the fixed point once per sample (concurrently), scores every
/// projected strategy on the same validation scenarios and ranks them.
pub fn tune<V: ScenarioSource + ?Sized + Sync>(
    cfg: &SystemConfig,
    samples: &[APPParams],
    scenarios: &[Scenario],
    validation: &V,
    seed: u64,
    exec: Exec,
) -> Result<TuneOutcome> {
    if samples.is_empty() {
        return Err(Error::Config("no samples to tune".into()));
    }
    let runs = exec.map(samples.len(), |s| -> Result<(Strategy, f64)> {
        let out = app_fixed_point(cfg, &samples[s], scenarios, seed, exec)?;
        let report = evaluate_strategy(&out.strategy, validation, cfg, exec)?;
        log::info!("sample {s}: mean validation cost {:.3}", report.mean_cost);
        Ok((out.strategy, report.mean_cost))
    });
    let mut strategies = Vec::with_capacity(samples.len());
    let mut leaderboard = Vec::with_capacity(samples.len());
    for (s, r) in runs.into_iter().enumerate() {
        let (u, mean_cost) = r?;
        strategies.push(u);
        leaderboard.push(LeaderboardEntry {
            sample: s,
            params: samples[s],
            mean_cost,
        });
    }
    leaderboard.sort_by(|a, b| a.mean_cost.total_cmp(&b.mean_cost).then(a.sample.cmp(&b.sample)));
    Ok(TuneOutcome {
        best: leaderboard[0].params,
        leaderboard,
        strategies,
    })
}
