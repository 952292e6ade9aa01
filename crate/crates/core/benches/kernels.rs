//! Sequential against rayon kernels across vector lengths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ellipcenter::kernels::seq;
use ellipcenter::rng::SplitMix64;

const LENGTHS: [usize; 4] = [1 << 12, 1 << 15, 1 << 18, 1 << 21];

fn vectors(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = SplitMix64::new(n as u64);
    (rng.vector(n, -1.0, 1.0), rng.vector(n, -1.0, 1.0))
}

fn dot(c: &mut Criterion) {
    let mut group = c.benchmark_group("dot");
    for n in LENGTHS {
        let (a, b) = vectors(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |bch, _| {
            bch.iter(|| seq::dot(black_box(&a), black_box(&b)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &n, |bch, _| {
            bch.iter(|| ellipcenter::kernels::par::dot(black_box(&a), black_box(&b)))
        });
    }
    group.finish();
}

fn lincomb(c: &mut Criterion) {
    let mut group = c.benchmark_group("lincomb");
    for n in LENGTHS {
        let (a, b) = vectors(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |bch, _| {
            bch.iter(|| seq::lincomb(0.5, black_box(&a), -2.0, black_box(&b)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &n, |bch, _| {
            bch.iter(|| ellipcenter::kernels::par::lincomb(0.5, black_box(&a), -2.0, black_box(&b)))
        });
    }
    group.finish();
}

fn dense_matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_matvec");
    for n in [256usize, 1024, 2048] {
        let mut rng = SplitMix64::new(7);
        let m = rng.vector(n * n, -1.0, 1.0);
        let x = rng.vector(n, -1.0, 1.0);
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |bch, &n| {
            bch.iter(|| seq::dense_matvec(n, black_box(&m), black_box(&x)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &n, |bch, &n| {
            bch.iter(|| ellipcenter::kernels::par::dense_matvec(n, black_box(&m), black_box(&x)))
        });
    }
    group.finish();
}

criterion_group!(benches, dot, lincomb, dense_matvec);
criterion_main!(benches);
