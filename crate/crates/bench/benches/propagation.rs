use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gravent_core::analytic::f_pair;
use gravent_core::entanglement::{evolved_negativity, negativity_at};
use gravent_core::model::initial_covariance;
use gravent_core::propagator::{evolve, matrix_exponential, propagate_oracle, Method, PropagatorPlan};
use gravent_core::SystemParams;

fn bright() -> SystemParams {
    SystemParams::symmetric(1e3, -1.0, 1e-12, 5e-13).unwrap()
}

fn propagation(c: &mut Criterion) {
    let s = bright();
    let plan = PropagatorPlan::from_params(&s);
    let init = initial_covariance(1.0).unwrap();
    c.bench_function("expm tau=13", |b| b.iter(|| matrix_exponential(black_box(&(plan.drift * 13.0)))));
    c.bench_function("evolve tau=13", |b| b.iter(|| evolve(&plan, &init, black_box(13.0))));
    let oracle = plan.with_method(Method::Oracle);
    c.bench_function("oracle tau=13", |b| b.iter(|| propagate_oracle(&oracle, &init, black_box(13.0))));
}

fn negativity(c: &mut Criterion) {
    let s = bright();
    let ev = evolve(&PropagatorPlan::from_params(&s), &initial_covariance(1.0).unwrap(), 13.0).unwrap();
    c.bench_function("negativity of evolved state", |b| b.iter(|| evolved_negativity(black_box(&ev))));
    c.bench_function("closed forms tau=13", |b| b.iter(|| f_pair(black_box(-1.0), black_box(13.0))));
}

fn contour(c: &mut Criterion) {
    let mut group = c.benchmark_group("contour");
    group.sample_size(10);
    group.bench_function("41x41 at tau=13", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..41 {
                for j in 0..41 {
                    let l1 = -1.0 + 0.05 * i as f64;
                    let l2 = -1.0 + 0.05 * j as f64;
                    let s = SystemParams::new(1e3, l1, l2, 1e-12, 5e-13, 1.0).unwrap();
                    acc += negativity_at(&s, 13.0).unwrap().log_negativity;
                }
            }
            acc
        })
    });
    group.finish();
}

criterion_group!(benches, propagation, negativity, contour);
criterion_main!(benches);
