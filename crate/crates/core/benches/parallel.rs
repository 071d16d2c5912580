//! Serial vs. rayon timings for the data-parallel hot paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ncpres_core::exactla::{rref, QMatrix};
use ncpres_core::par::set_parallel;
use ncpres_core::presentations::{certify, CertifyOptions, PresentationSpec};

fn hilbert_like(n: usize) -> QMatrix {
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| num::BigRational::new(1.into(), ((i + j + 1) as i64).into()))
                .collect()
        })
        .collect();
    QMatrix::from_rows(n, rows).unwrap()
}

fn bench_modes(c: &mut Criterion) {
    let thm1 = PresentationSpec::builtin("thm1").unwrap();
    let thm3 = PresentationSpec::builtin("thm3").unwrap();
    let m = hilbert_like(24);

    let mut group = c.benchmark_group("parallel_vs_serial");
    group.sample_size(10);
    for (label, parallel) in [("serial", false), ("parallel", true)] {
        group.bench_function(BenchmarkId::new("rref_24x24", label), |b| {
            set_parallel(parallel);
            b.iter(|| black_box(rref(&m)))
        });
        group.bench_function(BenchmarkId::new("evaluate_words_thm3_L5", label), |b| {
            set_parallel(parallel);
            b.iter(|| black_box(thm3.evaluate_all_words(5)))
        });
        group.bench_function(BenchmarkId::new("certify_thm1_L6", label), |b| {
            set_parallel(parallel);
            b.iter(|| black_box(certify(&thm1, CertifyOptions::new(6)).unwrap()))
        });
    }
    group.finish();
    set_parallel(true);
}

criterion_group!(benches, bench_modes);
criterion_main!(benches);
