// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qpmp_core::dynamics::{propagate_state, ControlPolicy};
use qpmp_core::liouville::Bounds;
use qpmp_core::models::{
    build_lambda_system, ket_bra, lambda_harmonic_reference, plus_state, sigma_y,
    two_level_collision, LambdaSystemParams,
};
use qpmp_core::qre::{brute_force_bangbang, BangBangSearch};
use qpmp_core::solver::{adjoint_gradient, objective, ProblemSpec};

const PERIOD: f64 = 0.626;

fn lambda(intervals: usize) -> (ProblemSpec, ControlPolicy) {
    let params = LambdaSystemParams::default();
    let model = build_lambda_system(&params).unwrap();
    let policy = lambda_harmonic_reference(&params, &model, PERIOD, intervals).unwrap();
    (ProblemSpec::periodic(model, PERIOD).unwrap(), policy)
}

fn propagation(c: &mut Criterion) {
    let mut g = c.benchmark_group("lambda");
    for m in [64, 256, 1024] {
        let (spec, policy) = lambda(m);
        let rho0 = spec.model.basis().density(&ket_bra(3, 0, 0)).unwrap();
        g.bench_with_input(BenchmarkId::new("propagate", m), &m, |b, _| {
            b.iter(|| propagate_state(&spec.model, black_box(&policy), &rho0).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("periodic_objective", m), &m, |b, _| {
            b.iter(|| objective(&spec, black_box(&policy)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("periodic_gradient", m), &m, |b, _| {
            b.iter(|| adjoint_gradient(&spec, black_box(&policy)).unwrap())
        });
    }
    g.finish();
}

fn bangbang(c: &mut Criterion) {
    let model = two_level_collision(
        1.0,
        &[ket_bra(2, 0, 0), plus_state()],
        &[Bounds::new(0.0, 2.0), Bounds::new(0.0, 2.0)],
        &sigma_y(),
    )
    .unwrap();
    let rho0 = model.basis().density(&ket_bra(2, 1, 1)).unwrap();
    let spec = ProblemSpec::terminal(model, rho0, 1.0).unwrap();
    let mut g = c.benchmark_group("bangbang");
    g.sample_size(10);
    for grid in [16, 32] {
        let search = BangBangSearch {
            max_switches: 2,
            grid,
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::new("pump_pair", grid), &grid, |b, _| {
            b.iter(|| brute_force_bangbang(&spec, black_box(&search)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, propagation, bangbang);
criterion_main!(benches);
