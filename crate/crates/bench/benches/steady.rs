use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dimdot_core::{
    build_hamiltonian, build_rates, correlation_report, density_matrix, eigensystem_analytic,
    eigensystem_numeric, rectification, steady_state_nullspace, transition_table, BathSpec, Bias,
    MeasurementSearch, SystemParams,
};

fn params() -> SystemParams {
    SystemParams::new(1.0, 0.3, 2.0, 4.0, 2.0).unwrap()
}

fn bench_eigen(c: &mut Criterion) {
    let p = params();
    c.bench_function("eigensystem_analytic", |b| b.iter(|| eigensystem_analytic(black_box(&p)).unwrap()));
    let h = build_hamiltonian(&p).unwrap();
    c.bench_function("eigensystem_numeric", |b| b.iter(|| eigensystem_numeric(black_box(&h))));
}

fn bench_steady(c: &mut Criterion) {
    let p = params();
    let tt = transition_table(&eigensystem_analytic(&p).unwrap(), None);
    let baths = BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap();
    c.bench_function("rates_and_steady_state", |b| {
        b.iter(|| steady_state_nullspace(&build_rates(black_box(&tt), &baths).unwrap()).unwrap())
    });
    let bias = Bias::new(1.0, 0.4, 1.0, 0.25);
    c.bench_function("rectification", |b| b.iter(|| rectification(black_box(&p), &bias).unwrap()));
}

fn bench_discord(c: &mut Criterion) {
    let p = params();
    let es = eigensystem_analytic(&p).unwrap();
    let w = build_rates(&transition_table(&es, None), &BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap()).unwrap();
    let rho = density_matrix(&steady_state_nullspace(&w).unwrap().populations, &es);
    let search = MeasurementSearch::default();
    c.bench_function("correlation_report", |b| b.iter(|| correlation_report(black_box(&rho), &search)));
}

criterion_group!(benches, bench_eigen, bench_steady, bench_discord);
criterion_main!(benches);
