use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use manifest_core::datasets::{gen_hypercube, gen_xor, stratified_subsample};
use manifest_core::{build_rbf_kernel, run_manifest, GeneratorConfig, ManifestConfig, ScalePolicy};

fn kernels(c: &mut Criterion) {
    let data = gen_hypercube(&GeneratorConfig::hypercube(1)).unwrap().data;
    let train = stratified_subsample(&data, 50, 1).unwrap();
    c.bench_function("rbf_kernel/50x200", |b| {
        b.iter(|| build_rbf_kernel(black_box(train.samples()), 10.0).unwrap())
    });
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_manifest");
    group.sample_size(20);

    let xor = gen_xor(&GeneratorConfig::xor(1)).unwrap();
    let xor_config = ManifestConfig {
        scale: ScalePolicy {
            percentile: 50.0,
            factor: 0.1,
        },
        ..ManifestConfig::default()
    };
    group.bench_function("xor_spsd", |b| {
        b.iter(|| run_manifest(black_box(&xor), &xor_config).unwrap())
    });

    let data = gen_hypercube(&GeneratorConfig::hypercube(2)).unwrap().data;
    let train = stratified_subsample(&data, 50, 2).unwrap();
    let hc_config = ManifestConfig {
        scale: ScalePolicy {
            percentile: 50.0,
            factor: 2.0,
        },
        ..ManifestConfig::default()
    };
    group.bench_function("hypercube_spd", |b| {
        b.iter(|| run_manifest(black_box(&train), &hc_config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kernels, end_to_end);
criterion_main!(benches);
