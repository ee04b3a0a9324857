//! Serial vs rayon-parallel execution of the three data-parallel stages.
//! Built without the `parallel` feature both variants run serially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use quantile_motion::bohm::bohm_ensemble;
use quantile_motion::{
    quantile_ensemble, sample_model, time_grid, DensityTolerances, Execution, Grid1D,
    IntegratorConfig, QuantileSpec, SolverOptions, WavefunctionModel,
};

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn free_setup() -> (WavefunctionModel, Grid1D, Vec<f64>) {
    let model = WavefunctionModel::free_gaussian(std::f64::consts::FRAC_PI_2).unwrap();
    let grid = Grid1D::with_spacing(-25.0, 25.0, 0.02).unwrap();
    let times = time_grid(3.0, 0.0067).unwrap();
    (model, grid, times)
}

fn sampling(c: &mut Criterion) {
    let (model, grid, times) = free_setup();
    let tol = DensityTolerances::default();
    let mut group = c.benchmark_group("sample_model");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample_model(&model, grid, &times, &tol, exec).unwrap())
        });
    }
    group.finish();
}

fn quantiles(c: &mut Criterion) {
    let (model, grid, times) = free_setup();
    let series = sample_model(&model, grid, &times, &DensityTolerances::default(), Execution::default())
        .unwrap();
    let specs: Vec<_> = (1..100).map(|k| QuantileSpec::Probability(k as f64 / 100.0)).collect();
    let mut group = c.benchmark_group("quantile_ensemble");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SolverOptions { execution: exec, ..SolverOptions::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| quantile_ensemble(black_box(&series), &specs, &opts).unwrap())
        });
    }
    group.finish();
}

fn bohm(c: &mut Criterion) {
    let model = WavefunctionModel::harmonic(3.0).unwrap();
    let times = time_grid(3.0, 0.1).unwrap();
    let cfg = IntegratorConfig::for_times(&times, 50).unwrap();
    let starts: Vec<f64> = (0..64).map(|k| -1.5 + 3.0 * k as f64 / 63.0).collect();
    let mut group = c.benchmark_group("bohm_ensemble");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| bohm_ensemble(&model, black_box(&starts), &cfg, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, sampling, quantiles, bohm);
criterion_main!(benches);
