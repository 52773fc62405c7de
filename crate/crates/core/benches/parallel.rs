use criterion::{criterion_group, criterion_main, Criterion};

use landskew::elastic::{karcher_mean, KarcherOptions};
use landskew::par;
use landskew::pipeline::{compute_diagrams, compute_landscapes, AnalysisConfig};
use landskew::simgen::{generate, Design, SimConfig};

fn pipeline_stages(c: &mut Criterion) {
    let sim = SimConfig { n_clouds: 20, ..SimConfig::for_design(Design::Circle) };
    let clouds = generate(&sim).unwrap();
    let cfg = AnalysisConfig { k: Some(1), t: 256, ..AnalysisConfig::default() };
    let diagrams = compute_diagrams(&clouds, &cfg).unwrap();
    let sample = compute_landscapes(&diagrams, &cfg).unwrap();
    let opts = KarcherOptions { max_iter: 3, ..KarcherOptions::default() };

    let mut group = c.benchmark_group("diagrams");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| par::with_threads(1, || compute_diagrams(&clouds, &cfg).unwrap())));
    group.bench_function("pool", |b| b.iter(|| par::with_threads(0, || compute_diagrams(&clouds, &cfg).unwrap())));
    group.finish();

    let mut group = c.benchmark_group("karcher");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| par::with_threads(1, || karcher_mean(&sample.landscapes, &opts).unwrap())));
    group.bench_function("pool", |b| b.iter(|| par::with_threads(0, || karcher_mean(&sample.landscapes, &opts).unwrap())));
    group.finish();
}

criterion_group!(benches, pipeline_stages);
criterion_main!(benches);
