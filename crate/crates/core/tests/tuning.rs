use maintopt::appdecomp::{app_fixed_point, APPParams};
use maintopt::evalharness::{evaluate_strategy, generate_scenarios, ScenarioDomain, ScenarioSet};
use maintopt::sysmodel::SystemConfig;
use maintopt::tuning::{lhs_params, tune};
use maintopt::Exec;

fn setup() -> (SystemConfig, Vec<maintopt::sysmodel::Scenario>, ScenarioSet) {
    let mut cfg = SystemConfig::small().with_n(4);
    cfg.horizon = 15;
    cfg.s_init = 1;
    let opt = generate_scenarios(4, 15, 5, 3).unwrap();
    let val = ScenarioSet::new(4, 15, 500, 3, ScenarioDomain::Validation).unwrap();
    (cfg, opt, val)
}

#[test]
fn a_single_sample_wins() {
    let (cfg, opt, val) = setup();
    let p = APPParams {
        iterations: 2,
        subproblem_budget: 30,
        ..APPParams::large_fleet()
    };
    let out = tune(&cfg, &[p], &opt, &val, 1, Exec::Parallel).unwrap();
    assert_eq!(out.best, p);
    assert_eq!(out.leaderboard.len(), 1);
}

#[test]
fn the_better_run_wins_and_the_board_is_sorted() {
    let (cfg, opt, val) = setup();
    let idle = APPParams {
        iterations: 0,
        ..APPParams::large_fleet()
    };
    let mut samples = vec![idle];
    samples.extend(lhs_params(3, 5, 4, 6, 150).unwrap());
    let out = tune(&cfg, &samples, &opt, &val, 2, Exec::Parallel).unwrap();

    // Independent re-scoring of every sample on the same validation set.
    let scores: Vec<f64> = samples
        .iter()
        .map(|p| {
            let run = app_fixed_point(&cfg, p, &opt, 2, Exec::Sequential).unwrap();
            evaluate_strategy(&run.strategy, &val, &cfg, Exec::Sequential).unwrap().mean_cost
        })
        .collect();
    let argmin = (0..scores.len()).min_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
    assert_eq!(out.best, samples[argmin]);
    assert_eq!(out.leaderboard[0].sample, argmin);
    for e in &out.leaderboard {
        assert_eq!(e.mean_cost, scores[e.sample]);
    }
    assert!(out.leaderboard.windows(2).all(|w| w[0].mean_cost <= w[1].mean_cost));
    // No maintenance at all loses to at least one tuned run here.
    assert_ne!(argmin, 0, "scores {scores:?}");
}

#[test]
fn ties_go_to_the_lower_index() {
    let (cfg, opt, val) = setup();
    let p = APPParams {
        iterations: 1,
        subproblem_budget: 20,
        ..APPParams::large_fleet()
    };
    let out = tune(&cfg, &[p, p, p], &opt, &val, 1, Exec::Sequential).unwrap();
    let order: Vec<usize> = out.leaderboard.iter().map(|e| e.sample).collect();
    assert_eq!(order, vec![0, 1, 2]);
}
