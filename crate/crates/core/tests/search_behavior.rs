//! Behavioral tests for the multi-start driver on desk-scale instances.

use ubqp::eval::{evaluate, init_gains, Solution};
use ubqp::instance::{generate_random, WeightSpec};
use ubqp::search::{
    run, steepest_ascent, DiversifyStrategy, LambdaPolicy, LogicalClock, SearchConfig,
};

fn exhaustive_max(inst: &ubqp::QuboInstance) -> i64 {
    let n = inst.n();
    assert!(n <= 20);
    (0u32..(1 << n))
        .map(|mask| {
            let bits: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
            evaluate(inst, &bits)
        })
        .max()
        .unwrap()
}

#[test]
fn desk_scale_runs_find_exhaustive_optimum() {
    let weights = WeightSpec::new(-10, 10).unwrap();
    let mut hits = 0;
    let trials = 20;
    for seed in 0..trials {
        let inst = generate_random(10, 0.6, weights, 100 + seed).unwrap();
        let config = SearchConfig {
            num_iterations: 500,
            seed,
            ..SearchConfig::default()
        };
        let result = run(&inst, &config, &mut LogicalClock::new(1e-4));
        assert_eq!(result.best_value, evaluate(&inst, result.best.bits()));
        if result.best_value == exhaustive_max(&inst) {
            hits += 1;
        }
    }
    assert!(hits * 10 >= trials * 9, "only {hits}/{trials} optimal");
}

#[test]
fn screen_gate_with_lambda_one() {
    // With λ = 1 the threshold equals the incumbent value, so every
    // ascent (including iteration 0) must yield a new trajectory point.
    let weights = WeightSpec::new(-10, 10).unwrap();
    for seed in 0..10 {
        let inst = generate_random(40, 0.5, weights, 300 + seed).unwrap();
        let config = SearchConfig {
            num_iterations: 300,
            seed,
            lambda_policy: LambdaPolicy::Fixed(1.0),
            ..SearchConfig::default()
        };
        let result = run(&inst, &config, &mut LogicalClock::new(1e-4));
        assert_eq!(result.trajectory.len(), result.ascent_count);
    }
}

#[test]
fn ascent_outputs_are_one_flip_local_optima() {
    let weights = WeightSpec::new(-10, 10).unwrap();
    for seed in 0..20 {
        let inst = generate_random(80, 0.5, weights, 500 + seed).unwrap();
        let start = Solution::evaluated(
            &inst,
            (0..80).map(|i| (seed as usize + i).is_multiple_of(3)).collect(),
        );
        let max_flips = 10 * inst.n();
        let (sol, flips) = steepest_ascent(&inst, start, max_flips);
        if flips < max_flips {
            assert!(init_gains(&inst, sol.bits()).as_slice().iter().all(|&g| g <= 0));
        }
        assert_eq!(sol.value(), evaluate(&inst, sol.bits()));
    }
}

#[test]
fn trajectory_invariants_hold() {
    let weights = WeightSpec::new(-10, 10).unwrap();
    let inst = generate_random(60, 0.5, weights, 77).unwrap();
    for strategy in [DiversifyStrategy::Perturb, DiversifyStrategy::Blend] {
        let config = SearchConfig {
            num_iterations: 400,
            seed: 9,
            diversify_strategy: strategy,
            ..SearchConfig::default()
        };
        let result = run(&inst, &config, &mut LogicalClock::new(1e-4));
        assert!(!result.trajectory.is_empty());
        let t = &result.trajectory;
        assert!(t.windows(2).all(|w| w[1].best_value > w[0].best_value));
        assert!(t.windows(2).all(|w| w[1].elapsed >= w[0].elapsed));
        assert_eq!(t.last().unwrap().best_value, result.best_value);
    }
}
