use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use strato::dispersion_lab::{eval_i_alpha_beta, PhaseIntegralSpec};
use strato::linear_stratified::{assemble_symbol, numeric_eigendecomposition, ModeEigenSystem};
use strato::pde_solvers::stratified_nonlinear_term;
use strato::spectral_core::{transform_forward, transform_inverse};
use strato::PhysParams;
use strato_bench::sample_state;

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_round_trip");
    for n in [16, 32, 48] {
        let f = sample_state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| {
                let p = transform_inverse(black_box(f));
                transform_forward(f.grid(), &p).unwrap()
            })
        });
    }
    group.finish();
}

fn nonlinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("stratified_nonlinear_term");
    group.sample_size(20);
    for n in [16, 32] {
        let f = sample_state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| stratified_nonlinear_term(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let p = PhysParams::new(0.1, 0.15, 0.01).unwrap();
    let xi = [1.0, -0.5, 2.0];
    c.bench_function("mode_eigensystem", |b| {
        b.iter(|| ModeEigenSystem::compute(black_box(xi), &p).unwrap())
    });
    let m = assemble_symbol(xi, &p).unwrap();
    c.bench_function("numeric_eigendecomposition", |b| {
        b.iter(|| numeric_eigendecomposition(black_box(&m)))
    });
}

fn phase_integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("phase_integral");
    for sigma in [1e2, 1e4, 1e6] {
        let spec = PhaseIntegralSpec::new(1.0, 0.5, 2.0, sigma).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(sigma), &spec, |b, s| {
            b.iter(|| eval_i_alpha_beta(black_box(s)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transforms, nonlinear, eigen, phase_integral);
criterion_main!(benches);
