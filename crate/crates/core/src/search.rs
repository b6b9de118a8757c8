//! The diversified multi-start search driver.
//!
//! Structure of one run: estimate the mean objective of random starts,
//! build the first-derivative starting solution, derive a screening
//! threshold `T = Mean + λ(Max − Mean)`, then loop
//! diversify → evaluate → screen → steepest ascent, raising `Max` (and
//! hence `T`) whenever a new incumbent is found. Improvements are
//! recorded as an anytime trajectory.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{
    apply_flip, evaluate, init_gains, sample_random_stats, SampleStats, Solution,
};
use crate::instance::QuboInstance;

const LAMBDA_EPS: f64 = 1e-6;

/// How the initial screening parameter λ is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    /// λ = start_value / mean, clamped into (ε, 1]; falls back to 0.5
    /// when the ratio is undefined (nonpositive mean or start value).
    PaperClamped,
    /// A fixed λ, clamped into (ε, 1].
    Fixed(f64),
}

/// How new starting points are derived from the incumbent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiversifyStrategy {
    /// Flip `k(i)` distinct random positions, `k(i) = 1 + (i mod K)`,
    /// `K = max(2, ⌈n/10⌉)`.
    Perturb,
    /// Uniform crossover between the incumbent and a fresh random vector.
    Blend,
}

/// Screening state: `threshold` is kept equal to
/// `mean + lambda·(max − mean)` across every update.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningState {
    mean: f64,
    max: i64,
    lambda: f64,
    threshold: f64,
}

impl ScreeningState {
    pub fn new(mean: f64, max: i64, lambda: f64) -> Self {
        assert!(lambda > 0.0 && lambda <= 1.0, "lambda must be in (0,1]");
        let mut s = ScreeningState {
            mean,
            max,
            lambda,
            threshold: 0.0,
        };
        s.recompute();
        s
    }

    fn recompute(&mut self) {
        self.threshold = compute_threshold(self.mean, self.max, self.lambda);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn max(&self) -> i64 {
        self.max
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Raises `max` (and recomputes the threshold, λ unchanged) when the
    /// candidate strictly improves on it. Returns whether it did.
    pub fn update_best(&mut self, candidate_value: i64) -> bool {
        if candidate_value > self.max {
            self.max = candidate_value;
            self.recompute();
            true
        } else {
            false
        }
    }
}

/// `T(λ) = mean + λ·(max − mean)`.
///
/// λ = 1 returns `max` exactly so the screen degenerates to a strict
/// improve-on-best gate without rounding slack.
pub fn compute_threshold(mean: f64, max: i64, lambda: f64) -> f64 {
    if lambda == 1.0 {
        return max as f64;
    }
    mean + lambda * (max as f64 - mean)
}

/// Initial λ from the sampled mean and the starting solution value.
pub fn initial_lambda(mean: f64, start_value: i64, policy: LambdaPolicy) -> f64 {
    match policy {
        LambdaPolicy::PaperClamped => {
            if mean > 0.0 && start_value > 0 {
                (start_value as f64 / mean).clamp(LAMBDA_EPS, 1.0)
            } else {
                0.5
            }
        }
        LambdaPolicy::Fixed(v) => v.clamp(LAMBDA_EPS, 1.0),
    }
}

/// Search parameters. `max_flips` of `None` resolves to `10·n` at run time.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub num_iterations: usize,
    pub time_limit: Option<f64>,
    pub num_samples: usize,
    pub seed: u64,
    pub lambda_policy: LambdaPolicy,
    pub max_flips: Option<usize>,
    pub diversify_strategy: DiversifyStrategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            num_iterations: 2500,
            time_limit: None,
            num_samples: 1000,
            seed: 0,
            lambda_policy: LambdaPolicy::PaperClamped,
            max_flips: None,
            diversify_strategy: DiversifyStrategy::Perturb,
        }
    }
}

/// One anytime improvement record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub elapsed: f64,
    pub iteration: usize,
    pub best_value: i64,
}

/// Final outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: Solution,
    pub best_value: i64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub iterations_run: usize,
    /// Number of screen passes (steepest ascents performed).
    pub ascent_count: usize,
    pub sample_stats: SampleStats,
    pub wall_time: f64,
}

/// Time source for trajectory stamps and the time limit.
pub trait Clock {
    /// Seconds since the search started.
    fn elapsed_secs(&mut self) -> f64;
}

/// Monotonic wall clock anchored at construction.
pub struct WallClock {
    start: std::time::Instant,
}

impl WallClock {
    pub fn new() -> Self {
        WallClock {
            start: std::time::Instant::now(),
        }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn elapsed_secs(&mut self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Deterministic clock advancing a fixed step per query; makes run
/// output byte-reproducible for determinism checks.
pub struct LogicalClock {
    t: f64,
    step: f64,
}

impl LogicalClock {
    pub fn new(step: f64) -> Self {
        LogicalClock { t: 0.0, step }
    }
}

impl Clock for LogicalClock {
    fn elapsed_secs(&mut self) -> f64 {
        let now = self.t;
        self.t += self.step;
        now
    }
}

/// Starting solution from the first derivative of the objective:
/// `x_i = 1` iff row `i` of `Q` sums strictly positive.
pub fn first_derivative_start(instance: &QuboInstance) -> Solution {
    let bits: Vec<bool> = instance.row_sums().iter().map(|&s| s > 0).collect();
    Solution::evaluated(instance, bits)
}

fn perturb_count(n: usize, i: usize) -> usize {
    let k_mod = std::cmp::max(2, n.div_ceil(10));
    1 + i % k_mod
}

/// Builds a new start from the incumbent. Never mutates `best`; the
/// returned solution's value cache is invalid.
pub fn diversify(
    best: &Solution,
    i: usize,
    strategy: DiversifyStrategy,
    rng: &mut impl Rng,
) -> Solution {
    let n = best.bits().len();
    let mut bits = best.bits().to_vec();
    match strategy {
        DiversifyStrategy::Perturb => {
            let k = perturb_count(n, i).min(n);
            for pos in sample(rng, n, k) {
                bits[pos] = !bits[pos];
            }
        }
        DiversifyStrategy::Blend => {
            let parent: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
            blend_with_parent(&mut bits, &parent, rng);
        }
    }
    Solution::new_unevaluated(bits)
}

// Each bit keeps the incumbent's value with probability 1/2 and takes
// the parent's otherwise.
fn blend_with_parent(bits: &mut [bool], parent: &[bool], rng: &mut impl Rng) {
    for (b, &p) in bits.iter_mut().zip(parent) {
        if !rng.gen::<bool>() {
            *b = p;
        }
    }
}

/// Steepest ascent by strictly improving 1-flips: repeatedly applies the
/// largest positive gain (ties broken by lowest index) until no gain is
/// positive or `max_flips` flips were made. No tabu list or cycle checks
/// are needed since each flip strictly increases the objective.
pub fn steepest_ascent(
    instance: &QuboInstance,
    start: Solution,
    max_flips: usize,
) -> (Solution, usize) {
    let mut sol = start;
    sol.ensure_value(instance);
    let mut gains = init_gains(instance, sol.bits());
    let mut flips = 0;
    while flips < max_flips {
        let mut best_i = None;
        let mut best_gain = 0i64;
        for (i, &g) in gains.as_slice().iter().enumerate() {
            if g > best_gain {
                best_gain = g;
                best_i = Some(i);
            }
        }
        match best_i {
            Some(i) => {
                apply_flip(instance, &mut sol, &mut gains, i);
                flips += 1;
            }
            None => break,
        }
    }
    (sol, flips)
}

/// Executes the full diversify-screen-ascend loop.
///
/// Iteration 0 always ascends from the starting solution, bypassing the
/// screen, so the trajectory is never empty. Later iterations ascend
/// only when the diversified value strictly exceeds the threshold. Runs
/// stop early once `time_limit` elapses. Deterministic for a fixed
/// `(instance, config)` and deterministic clock.
pub fn run(
    instance: &QuboInstance,
    config: &SearchConfig,
    clock: &mut dyn Clock,
) -> SearchResult {
    assert!(config.num_iterations >= 1);
    assert!(config.num_samples >= 1);
    let n = instance.n();
    let max_flips = config.max_flips.unwrap_or(10 * n).max(1);

    let stats = sample_random_stats(instance, config.num_samples, config.seed);
    let start = first_derivative_start(instance);
    let start_value = start.value();
    let lambda = initial_lambda(stats.mean, start_value, config.lambda_policy);
    let mut state = ScreeningState::new(stats.mean, start_value, lambda);

    // Diversification draws from a separate ChaCha stream so it is
    // independent of the sampling stream above.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let mut best = start.clone();
    let mut best_value = start_value;
    let mut trajectory: Vec<TrajectoryPoint> = Vec::new();
    let mut ascent_count = 0usize;
    let mut iterations_run = 0usize;

    for i in 0..config.num_iterations {
        if i > 0 {
            if let Some(limit) = config.time_limit {
                if clock.elapsed_secs() >= limit {
                    break;
                }
            }
        }
        iterations_run = i + 1;
        let mut candidate = if i == 0 {
            start.clone()
        } else {
            diversify(&best, i, config.diversify_strategy, &mut rng)
        };
        let value = candidate.ensure_value(instance);
        if i > 0 && (value as f64) <= state.threshold() {
            continue;
        }
        let (ascended, _flips) = steepest_ascent(instance, candidate, max_flips);
        ascent_count += 1;
        let ascended_value = ascended.value();
        let improved = state.update_best(ascended_value);
        if improved {
            best = ascended;
            best_value = ascended_value;
            trajectory.push(TrajectoryPoint {
                elapsed: clock.elapsed_secs(),
                iteration: i,
                best_value,
            });
        } else if i == 0 {
            // Starting ascent may end exactly at the seed value; record
            // it anyway so the trajectory always has the first ascent.
            best = ascended;
            trajectory.push(TrajectoryPoint {
                elapsed: clock.elapsed_secs(),
                iteration: 0,
                best_value,
            });
        }
    }

    debug_assert_eq!(best_value, evaluate(instance, best.bits()));
    SearchResult {
        best,
        best_value,
        trajectory,
        iterations_run,
        ascent_count,
        sample_stats: stats,
        wall_time: clock.elapsed_secs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::QuboInstance;

    fn inst(rows: &[&[i64]]) -> QuboInstance {
        let n = rows.len();
        let q: Vec<i64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        QuboInstance::from_matrix("test", n, q).unwrap()
    }

    fn q2() -> QuboInstance {
        inst(&[&[1, 2], &[2, -3]])
    }

    fn q3() -> QuboInstance {
        inst(&[&[2, -1, 3], &[-1, -2, 1], &[3, 1, -4]])
    }

    #[test]
    fn first_derivative_start_cases() {
        let s = first_derivative_start(&q2());
        assert_eq!(s.bits(), &[true, false]);
        assert_eq!(s.value(), 1);

        let s = first_derivative_start(&q3());
        assert_eq!(s.bits(), &[true, false, false]);
        assert_eq!(s.value(), 2);

        let neg = inst(&[&[-1, -2], &[-2, -3]]);
        let s = first_derivative_start(&neg);
        assert_eq!(s.bits(), &[false, false]);
        assert_eq!(s.value(), 0);
    }

    #[test]
    fn initial_lambda_cases() {
        assert_eq!(initial_lambda(100.0, 200, LambdaPolicy::PaperClamped), 1.0);
        assert_eq!(initial_lambda(-0.5, 2, LambdaPolicy::PaperClamped), 0.5);
        assert_eq!(initial_lambda(100.0, 100, LambdaPolicy::PaperClamped), 1.0);
        assert_eq!(initial_lambda(200.0, 100, LambdaPolicy::PaperClamped), 0.5);
        assert_eq!(initial_lambda(0.0, 5, LambdaPolicy::Fixed(2.0)), 1.0);
        assert_eq!(initial_lambda(0.0, 5, LambdaPolicy::Fixed(-1.0)), LAMBDA_EPS);
    }

    #[test]
    fn threshold_cases() {
        assert_eq!(compute_threshold(100.0, 200, 0.5), 150.0);
        assert_eq!(compute_threshold(100.0, 200, 1.0), 200.0);
        assert_eq!(compute_threshold(100.0, 100, 0.3), 100.0);
    }

    #[test]
    fn update_best_cases() {
        let mut s = ScreeningState::new(0.0, 2, 0.5);
        assert_eq!(s.threshold(), 1.0);
        assert!(s.update_best(4));
        assert_eq!(s.max(), 4);
        assert_eq!(s.threshold(), 2.0);
        assert!(!s.update_best(4));
        assert!(!s.update_best(3));
        assert_eq!(s.max(), 4);
    }

    #[test]
    fn perturb_hamming_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = Solution::new_unevaluated(vec![false; 100]);
        // n=100 → K=10; i=25 → k = 1 + (25 mod 10) = 6.
        let d = diversify(&base, 25, DiversifyStrategy::Perturb, &mut rng);
        let dist = d.bits().iter().filter(|&&b| b).count();
        assert_eq!(dist, 6);
        // i multiple of K → k = 1.
        let d = diversify(&base, 20, DiversifyStrategy::Perturb, &mut rng);
        assert_eq!(d.bits().iter().filter(|&&b| b).count(), 1);
        assert!(!d.has_value());
    }

    #[test]
    fn blend_identical_parents_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base: Vec<bool> = (0..64).map(|_| rng.gen()).collect();
        let mut bits = base.clone();
        blend_with_parent(&mut bits, &base, &mut rng);
        assert_eq!(bits, base);
    }

    #[test]
    fn blend_takes_bits_from_either_parent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = Solution::new_unevaluated(vec![true; 64]);
        let d = diversify(&base, 3, DiversifyStrategy::Blend, &mut rng);
        assert_eq!(d.bits().len(), 64);
        assert!(!d.has_value());
    }

    #[test]
    fn steepest_ascent_cases() {
        let (sol, flips) = steepest_ascent(&q2(), Solution::evaluated(&q2(), vec![true, false]), 100);
        assert_eq!(sol.bits(), &[true, true]);
        assert_eq!(sol.value(), 2);
        assert_eq!(flips, 1);

        let q = q3();
        let (sol, flips) =
            steepest_ascent(&q, Solution::evaluated(&q, vec![true, false, false]), 100);
        assert_eq!(sol.bits(), &[true, false, true]);
        assert_eq!(sol.value(), 4);
        assert_eq!(flips, 1);

        // Already locally optimal.
        let (sol, flips) =
            steepest_ascent(&q, Solution::evaluated(&q, vec![true, false, true]), 100);
        assert_eq!(sol.value(), 4);
        assert_eq!(flips, 0);
    }

    #[test]
    fn run_finds_q3_optimum_and_is_deterministic() {
        let q = q3();
        let config = SearchConfig {
            num_iterations: 50,
            ..SearchConfig::default()
        };
        let a = run(&q, &config, &mut LogicalClock::new(0.001));
        let b = run(&q, &config, &mut LogicalClock::new(0.001));
        assert_eq!(a.best_value, 4);
        assert_eq!(a, b);
        assert!(!a.trajectory.is_empty());
        let values: Vec<i64> = a.trajectory.iter().map(|p| p.best_value).collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(a.trajectory.last().unwrap().best_value, a.best_value);
    }

    #[test]
    fn run_respects_time_limit() {
        let q = crate::instance::generate_random(
            60,
            0.5,
            crate::instance::WeightSpec::new(-10, 10).unwrap(),
            3,
        )
        .unwrap();
        let config = SearchConfig {
            num_iterations: 1000,
            time_limit: Some(0.5),
            ..SearchConfig::default()
        };
        // Logical clock steps 0.01 per query, so the limit trips long
        // before 1000 iterations.
        let r = run(&q, &config, &mut LogicalClock::new(0.01));
        assert!(r.iterations_run < 1000);
    }
}
