use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use itemgauge::assoc::{bvn_cdf, polychoric};
use itemgauge::item::Marginals;
use itemgauge::selection::{stepwise_select, SelectionOptions};
use itemgauge::{correlation_matrix, fit, generate_synthetic, Dataset, FitOptions, FittedModel, Predictor};

fn corpus(n: usize, seed: u64) -> Dataset {
    generate_synthetic(
        &Marginals::reference(),
        Some(&FittedModel::published_six_variable()),
        n,
        seed,
    )
    .unwrap()
}

fn bench_fit(c: &mut Criterion) {
    let vars: Vec<Predictor> = ["T2", "C2", "C3", "S1", "S4", "S6"]
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    let mut group = c.benchmark_group("fit");
    for n in [300, 1000, 5000] {
        let data = corpus(n, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, data| {
            b.iter(|| fit(black_box(data), &vars, &FitOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_select(c: &mut Criterion) {
    let data = corpus(300, 7);
    let mut group = c.benchmark_group("stepwise");
    group.sample_size(10);
    for threads in [1, 4] {
        let options = SelectionOptions {
            threads,
            ..SelectionOptions::default()
        };
        group.bench_with_input(BenchmarkId::new("threads", threads), &options, |b, options| {
            b.iter(|| stepwise_select(black_box(&data), &Predictor::ALL, options).unwrap())
        });
    }
    group.finish();
}

fn bench_association(c: &mut Criterion) {
    let data = corpus(300, 7);
    let x = data.column(Predictor::T1);
    let y = data.column(Predictor::T2);
    c.bench_function("bvn_cdf", |b| {
        b.iter(|| bvn_cdf(black_box(0.3), black_box(-0.7), black_box(0.65)).unwrap())
    });
    c.bench_function("polychoric_300", |b| {
        b.iter(|| polychoric(black_box(&x), black_box(&y)).unwrap())
    });
    let mut group = c.benchmark_group("correlation_matrix");
    group.sample_size(10);
    group.bench_function("300", |b| b.iter(|| correlation_matrix(black_box(&data)).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_fit, bench_select, bench_association);
criterion_main!(benches);
