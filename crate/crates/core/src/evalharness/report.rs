use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sysmodel::{simulate_into, total_cost, CostBreakdown, Strategy, SystemConfig, Trajectory};

use super::scenarios::ScenarioSource;

/// Quantile levels, in percent.
pub const QUANTILE_LEVELS: [u32; 7] = [1, 5, 25, 50, 75, 95, 99];

const HISTOGRAM_BINS: usize = 40;
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub percent: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcedOutageStats {
    /// Mean number of steps with a forced outage per scenario.
    pub mean_steps: f64,
    /// Mean number of outage episodes (steps entering an outage) per scenario.
    pub mean_onsets: f64,
    /// Scenarios with at least one outage step, over all scenarios.
    pub scenarios_with_outage: usize,
    pub fraction_with_outage: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

/// Evaluation of a binary strategy on a validation set with the exact
/// dynamics. Costs are in k€; all means are over scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenarios: usize,
    /// Whether the input had to be projected on `{0, 1}` first.
    pub projected: bool,
    pub mean_cost: f64,
    pub quantiles: Vec<Quantile>,
    /// Mean PM, CM and forced-outage costs.
    pub breakdown: CostBreakdown,
    /// PMs in the (projected) schedule, i.e. controls at or above `ν`.
    pub scheduled_pms: usize,
    pub mean_pms_per_component: f64,
    /// PMs actually carried out (a broken component is not maintained).
    pub mean_realized_pms: f64,
    pub mean_failures_per_component: Vec<f64>,
    pub mean_failures: f64,
    pub forced_outage: ForcedOutageStats,
    /// Scheduled PMs at steps `0..=t`, for `t = 0..T`.
    pub cumulative_pms: Vec<usize>,
    /// Fraction of scenarios with an empty stock at `t = 0..=T`.
    pub empty_stock_probability: Vec<f64>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, Default)]
struct ChunkStats {
    costs: Vec<CostBreakdown>,
    failures: Vec<usize>,
    realized_pms: usize,
    fo_steps: usize,
    fo_onsets: usize,
    fo_scenarios: usize,
    fo_max: usize,
    empty: Vec<usize>,
}

fn run_chunk<S: ScenarioSource + ?Sized>(
    strategy: &Strategy,
    set: &S,
    cfg: &SystemConfig,
    lo: usize,
    hi: usize,
) -> Result<ChunkStats> {
    let (n, horizon) = (cfg.n, cfg.horizon);
    let mut tr = Trajectory::new(cfg);
    let mut st = ChunkStats {
        failures: vec![0; n],
        empty: vec![0; horizon + 1],
        ..Default::default()
    };
    for q in lo..hi {
        let w = set.scenario(q);
        simulate_into(&mut tr, strategy, &w, cfg)?;
        st.costs.push(total_cost(&tr, strategy, cfg));
        for t in 0..=horizon {
            for i in 0..n {
                st.failures[i] += tr.failure[t * n + i] as usize;
                st.realized_pms += tr.pm[t * n + i] as usize;
            }
            st.empty[t] += (tr.stock[t] == 0.0) as usize;
        }
        let steps = tr.forced_outage.iter().filter(|&&f| f).count();
        let onsets = (0..=horizon)
            .filter(|&t| tr.forced_outage[t] && (t == 0 || !tr.forced_outage[t - 1]))
            .count();
        st.fo_steps += steps;
        st.fo_onsets += onsets;
        st.fo_scenarios += (steps > 0) as usize;
        st.fo_max = st.fo_max.max(steps);
    }
    Ok(st)
}

/// Nearest-rank quantile of sorted data: the `⌈p·N/100⌉`-th smallest value.
pub fn nearest_rank(sorted: &[f64], percent: u32) -> f64 {
    let n = sorted.len();
    let rank = (percent as usize * n).div_ceil(100).clamp(1, n);
    sorted[rank - 1]
}

/// Simulate the exact dynamics on every scenario of `set` and aggregate.
/// Non-binary strategies are projected with `ν` first.
pub fn evaluate_strategy<S: ScenarioSource + ?Sized>(
    strategy: &Strategy,
    set: &S,
    cfg: &SystemConfig,
    exec: Exec,
) -> Result<EvaluationReport> {
    strategy.check_dims(cfg)?;
    let projected = strategy.as_slice().iter().any(|&v| v != 0.0 && v != 1.0);
    let strategy = if projected {
        log::info!("projecting a non-binary strategy with nu = {}", cfg.nu);
        strategy.project(cfg.nu)
    } else {
        strategy.clone()
    };
    let (n, horizon) = (cfg.n, cfg.horizon);
    let count = set.count();
    if count == 0 {
        return Err(Error::Config("need at least one scenario".into()));
    }
    let nchunks = count.div_ceil(CHUNK);
    let chunks = exec.map(nchunks, |c| {
        run_chunk(&strategy, set, cfg, c * CHUNK, ((c + 1) * CHUNK).min(count))
    });

    let mut costs = Vec::with_capacity(count);
    let mut failures = vec![0usize; n];
    let mut empty = vec![0usize; horizon + 1];
    let (mut realized, mut fo_steps, mut fo_onsets, mut fo_scen, mut fo_max) = (0, 0, 0, 0, 0);
    for ch in chunks {
        let ch = ch?;
        costs.extend(ch.costs);
        for (a, b) in failures.iter_mut().zip(&ch.failures) {
            *a += b;
        }
        for (a, b) in empty.iter_mut().zip(&ch.empty) {
            *a += b;
        }
        realized += ch.realized_pms;
        fo_steps += ch.fo_steps;
        fo_onsets += ch.fo_onsets;
        fo_scen += ch.fo_scenarios;
        fo_max = fo_max.max(ch.fo_max);
    }

    let qn = count as f64;
    let (mut pm, mut cm, mut fo, mut total) = (0.0, 0.0, 0.0, 0.0);
    for c in &costs {
        pm += c.pm;
        cm += c.cm;
        fo += c.fo;
        total += c.total;
    }
    let mut sorted: Vec<f64> = costs.iter().map(|c| c.total).collect();
    sorted.sort_by(f64::total_cmp);

    let scheduled = strategy.scheduled_pms(cfg.nu);
    let mut cumulative = Vec::with_capacity(horizon);
    let mut acc = 0;
    for t in 0..horizon {
        acc += (0..n).filter(|&i| strategy.get(i, t) >= cfg.nu).count();
        cumulative.push(acc);
    }
    let per_comp: Vec<f64> = failures.iter().map(|&f| f as f64 / qn).collect();

    Ok(EvaluationReport {
        scenarios: count,
        projected,
        mean_cost: total / qn,
        quantiles: QUANTILE_LEVELS
            .iter()
            .map(|&p| Quantile {
                percent: p,
                value: nearest_rank(&sorted, p),
            })
            .collect(),
        breakdown: CostBreakdown {
            pm: pm / qn,
            cm: cm / qn,
            fo: fo / qn,
            total: total / qn,
        },
        scheduled_pms: scheduled,
        mean_pms_per_component: scheduled as f64 / n as f64,
        mean_realized_pms: realized as f64 / qn,
        mean_failures: failures.iter().sum::<usize>() as f64 / qn / n as f64,
        mean_failures_per_component: per_comp,
        forced_outage: ForcedOutageStats {
            mean_steps: fo_steps as f64 / qn,
            mean_onsets: fo_onsets as f64 / qn,
            scenarios_with_outage: fo_scen,
            fraction_with_outage: fo_scen as f64 / qn,
            max_steps: fo_max,
        },
        cumulative_pms: cumulative,
        empty_stock_probability: empty.iter().map(|&e| e as f64 / qn).collect(),
        histogram: histogram(&sorted),
    })
}

fn histogram(sorted: &[f64]) -> Histogram {
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut counts = vec![0; HISTOGRAM_BINS];
    for &v in sorted {
        let b = if width > 0.0 {
            (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    Histogram { lo, width, counts }
}
