use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use giantspin::sweep::find_crossings_with;
use giantspin::{sweep_spectrum_with, Execution, SpinSystem, SweepGrid};

fn bench_sweep(c: &mut Criterion) {
    let system = SpinSystem::fe8();
    let mut group = c.benchmark_group("easy_axis_sweep");
    group.sample_size(10);
    for steps in [200usize, 1000] {
        let grid = SweepGrid::easy_axis(0.0, 1.0, steps).unwrap();
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, steps), &grid, |b, grid| {
                b.iter(|| black_box(sweep_spectrum_with(&system, grid, exec).unwrap()));
            });
        }
    }
    group.finish();
}

fn bench_crossings(c: &mut Criterion) {
    let system = SpinSystem::fe8();
    let grid = SweepGrid::easy_axis(0.0, 1.0, 1000).unwrap();
    let result = sweep_spectrum_with(&system, &grid, Execution::default()).unwrap();
    let mut group = c.benchmark_group("crossing_refinement");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| black_box(find_crossings_with(&result, None, exec))));
    }
    group.finish();
}

fn bench_hard_axis(c: &mut Criterion) {
    let system = SpinSystem::fe8();
    let grid = SweepGrid::hard_axis(0.0, 3.0, 301).unwrap();
    let mut group = c.benchmark_group("hard_axis_sweep");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| black_box(sweep_spectrum_with(&system, &grid, exec).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_crossings, bench_hard_axis);
criterion_main!(benches);
