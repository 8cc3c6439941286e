//! Parallel vs sequential throughput on the data-parallel workloads:
//! Monte Carlo unit-root batches, batch variance decompositions of random
//! models, and the all-pairs Granger matrix.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use tsecon::exec::{replicate_seq, replication_seed};
use tsecon::series::Dataset;
use tsecon::unitroot::{adf_test, Deterministic, LagSpec};
use tsecon::varkit::{
    cholesky_factor, fevd, granger_matrix, matrix_to_dataset, random_stable_var, simulate_var,
    var_estimate,
};

#[cfg(feature = "parallel")]
use tsecon::exec::replicate_par;

fn adf_replication(seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0.0; 400];
    for t in 1..400 {
        y[t] = y[t - 1] + rng.sample::<f64, _>(StandardNormal);
    }
    adf_test(&y, Deterministic::ConstantTrend, LagSpec::Auto)
        .unwrap()
        .reject_unit_root
}

fn fevd_replication(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 5;
    let (intercept, coefs, omega) = random_stable_var(k, 2, 0.8, &mut rng);
    let chol = cholesky_factor(&omega).unwrap();
    let data = simulate_var(&intercept, &coefs, &chol, 400, 100, &mut rng);
    let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
    let d = matrix_to_dataset(&data, &names).unwrap();
    let model = var_estimate(&d, 2).unwrap();
    let f = fevd(&model, "v0", 18).unwrap();
    f.shares[17].iter().sum()
}

fn bench_monte_carlo_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_adf_batch");
    for reps in [16usize, 64] {
        group.bench_with_input(BenchmarkId::new("seq", reps), &reps, |b, &reps| {
            b.iter(|| replicate_seq(reps, 42, adf_replication))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", reps), &reps, |b, &reps| {
            b.iter(|| replicate_par(reps, 42, adf_replication))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("fevd_batch");
    for reps in [16usize, 64] {
        group.bench_with_input(BenchmarkId::new("seq", reps), &reps, |b, &reps| {
            b.iter(|| replicate_seq(reps, 43, fevd_replication))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", reps), &reps, |b, &reps| {
            b.iter(|| replicate_par(reps, 43, fevd_replication))
        });
    }
    group.finish();
}

fn bench_granger_matrix(c: &mut Criterion) {
    // 7 variables, 600 rows: 42 ordered pairs per call. The pair loop runs
    // on the feature-selected path (rayon under `parallel`).
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(7, 7));
    let data = DMatrix::from_fn(600, 7, |_, _| rng.sample::<f64, _>(StandardNormal));
    let names: Vec<String> = (0..7).map(|i| format!("v{i}")).collect();
    let d: Dataset = matrix_to_dataset(&data, &names).unwrap();
    c.bench_function("granger_matrix_7x600", |b| {
        b.iter(|| granger_matrix(&d, 2).unwrap())
    });
}

criterion_group!(benches, bench_monte_carlo_batches, bench_granger_matrix);
criterion_main!(benches);
