use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use portent::classifiers::{train, ModelSpec, NbParams, SvmParams, TreeParams};
use portent::evaluation::cross_validate;
use portent::selection::rank_features;
use portent_bench::bench_dataset;

fn bench_ranking(c: &mut Criterion) {
    let ds = bench_dataset(2000);
    c.bench_function("rank_features/2000x10bins", |b| {
        b.iter(|| rank_features(&ds, 10).unwrap())
    });
}

fn bench_training(c: &mut Criterion) {
    let ds = bench_dataset(2000);
    let mut group = c.benchmark_group("train/2000");
    let specs = [
        ("nb", ModelSpec::NaiveBayes(NbParams::default())),
        (
            "tree",
            ModelSpec::DecisionTree(TreeParams {
                max_depth: Some(12),
                min_leaf: 5,
            }),
        ),
        (
            "svm",
            ModelSpec::LinearSvm(SvmParams {
                epochs: 30,
                ..SvmParams::default()
            }),
        ),
    ];
    for (name, spec) in &specs {
        group.bench_with_input(BenchmarkId::from_parameter(name), spec, |b, spec| {
            b.iter(|| train(&ds, spec).unwrap())
        });
    }
    group.finish();
}

fn bench_cross_validation(c: &mut Criterion) {
    let ds = bench_dataset(1000);
    let spec = ModelSpec::NaiveBayes(NbParams::default());
    let mut group = c.benchmark_group("cross_validate/1000");
    group.sample_size(20);
    group.bench_function("nb_10fold", |b| {
        b.iter(|| cross_validate(&ds, &spec, 10, 42, None).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_ranking,
    bench_training,
    bench_cross_validation
);
criterion_main!(benches);
