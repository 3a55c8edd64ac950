//! Parallel-vs-sequential comparison of the data-parallel kernels.
//!
//! The `parallel` feature is compile-time, so the sequential side is measured
//! by running the same code inside a one-thread rayon pool; the parallel side
//! uses a pool sized to the machine.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use geomex_core::discrepancy::{discrepancy_exact_with_cap, discrepancy_local_search};
use geomex_core::generators::{complete_partite, flag_complex, FlagComplexSpec};
use geomex_core::geometry::{overlap_search_2d, Embedding};
use geomex_core::spectral::{lambda_tilde, LambdaOptions};

fn pools() -> [(&'static str, rayon::ThreadPool); 2] {
    let seq = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let par = rayon::ThreadPoolBuilder::new().build().unwrap();
    [("seq", seq), ("par", par)]
}

fn bench_disc_exact(c: &mut Criterion) {
    let cx = complete_partite(&[8, 8, 8]).unwrap();
    let mut group = c.benchmark_group("disc_exact_8x8x8");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| discrepancy_exact_with_cap(&cx, 24).unwrap().value_f64()))
        });
    }
    group.finish();
}

fn bench_disc_local(c: &mut Criterion) {
    let cx = flag_complex(&FlagComplexSpec::new(2, 2)).unwrap();
    let mut group = c.benchmark_group("disc_local_flag_q2_d2");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| discrepancy_local_search(&cx, 32, 7).unwrap().value_f64()))
        });
    }
    group.finish();
}

fn bench_overlap_search(c: &mut Criterion) {
    let cx = complete_partite(&[4, 4, 4]).unwrap();
    let emb = Embedding::random_unit_cube(&cx, 3);
    let mut group = c.benchmark_group("overlap_search_4x4x4");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| overlap_search_2d(&cx, &emb).unwrap().covered))
        });
    }
    group.finish();
}

fn bench_lambda_dense(c: &mut Criterion) {
    let cx = flag_complex(&FlagComplexSpec::new(3, 2)).unwrap();
    let g = cx.induced_bipartite(1).unwrap();
    let mut group = c.benchmark_group("lambda_dense_flag_q3_d2_B1");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| lambda_tilde(&g, &LambdaOptions::dense()).unwrap().value))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_disc_exact,
    bench_disc_local,
    bench_overlap_search,
    bench_lambda_dense
);
criterion_main!(benches);
