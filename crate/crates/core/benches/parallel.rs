//! Parallel vs single-thread comparison for the data-parallel inner loops
//! (2-d quadrature behind the epigraph measure, and a metric sweep over a
//! corpus). The crate auto-parallelizes with rayon when the `parallel`
//! feature is on; here each benchmark runs the same work inside a 1-thread
//! and an N-thread rayon pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epimetrics::linalg::Matrix;
use epimetrics::metric::{delta_zeta_p, epigraph_measure};
use epimetrics::sampler;
use epimetrics::{ConvexFunction, NumericConfig, WeightFunction};
use rand::SeedableRng;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn bench_epigraph_measure(c: &mut Criterion) {
    let mut group = c.benchmark_group("epigraph_measure_2d");
    group.sample_size(10);
    let u = ConvexFunction::quadratic(
        Matrix::from_rows(&[vec![1.0, 0.2], vec![0.2, 0.8]]).unwrap(),
        vec![0.3, -0.1],
        0.0,
    )
    .unwrap();
    let zeta = WeightFunction::exponential(1.0);
    let cfg = NumericConfig {
        grid_2d: 384,
        refine_2d: 2,
        ..NumericConfig::default()
    };
    for threads in [1usize, num_threads()] {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            let p = pool(t);
            b.iter(|| p.install(|| epigraph_measure(&u, &zeta, &cfg).unwrap().value));
        });
    }
    group.finish();
}

fn bench_metric_corpus(c: &mut Criterion) {
    let mut group = c.benchmark_group("delta_zeta_p_corpus");
    group.sample_size(10);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let corpus: Vec<_> = (0..12)
        .map(|_| {
            (
                sampler::random_quadratic_1d(&mut rng),
                sampler::random_quadratic_1d(&mut rng),
            )
        })
        .collect();
    let zeta = WeightFunction::exponential(1.0);
    let cfg = NumericConfig::default();
    for threads in [1usize, num_threads()] {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            let p = pool(t);
            b.iter(|| {
                p.install(|| {
                    epimetrics::par::map_slice(&corpus, |(u, v)| {
                        delta_zeta_p(u, v, &zeta, 1.0, &cfg).unwrap().value
                    })
                    .into_iter()
                    .sum::<f64>()
                })
            });
        });
    }
    group.finish();
}

fn num_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4)
}

criterion_group!(benches, bench_epigraph_measure, bench_metric_corpus);
criterion_main!(benches);
