//! Compares sequential and data-parallel batch evaluation.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ubqp::instance::{generate_random, WeightSpec};

fn random_batch(n: usize, count: usize, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen::<bool>()).collect())
        .collect()
}

fn bench_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_batch");
    for &n in &[250usize, 1000] {
        let inst = generate_random(n, 0.5, WeightSpec::new(-100, 100).unwrap(), 1).unwrap();
        let batch = random_batch(n, 200, 2);
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| ubqp::eval::evaluate_batch_seq(&inst, &batch))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| ubqp::eval::evaluate_batch(&inst, &batch))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_batch);
criterion_main!(benches);
