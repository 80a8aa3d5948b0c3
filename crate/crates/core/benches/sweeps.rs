use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tempcorr::channel::ChannelKind;
use tempcorr::measurement::BsmType;
use tempcorr::optimize::K4Search;
use tempcorr::parallel::Execution;
use tempcorr::reference::regression_report_with;
use tempcorr::sweep::{k4_sweep_with, linear_grid, LgiSweep};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn k4_sweep(c: &mut Criterion) {
    let grid = linear_grid(0.0, 1.0, 101).unwrap();
    let mus = [0.0, 0.25, 0.5, 0.75, 1.0];
    let template = LgiSweep::published(ChannelKind::AmplitudeDamping, BsmType::TypeI);
    let mut group = c.benchmark_group("k4_sweep_101x5");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| k4_sweep_with(exec, black_box(&template), &grid, &mus).unwrap())
        });
    }
    group.finish();
}

fn regression(c: &mut Criterion) {
    let grid = linear_grid(0.0, 1.0, 11).unwrap();
    let mus = [0.0, 0.5, 1.0];
    let mut group = c.benchmark_group("regression_report");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| regression_report_with(exec, black_box(&grid), &mus).unwrap())
        });
    }
    group.finish();
}

fn restarts(c: &mut Criterion) {
    let search = K4Search::new(ChannelKind::PhaseDamping, 0.3, 0.5, BsmType::TypeII, 8, 1);
    let mut group = c.benchmark_group("optimizer_8_restarts");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| search.run_with(exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, k4_sweep, regression, restarts);
criterion_main!(benches);
