use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use phasekin::asymptotic::{composite_for_bar, residuals};
use phasekin::linalg::solve_thomas;
use phasekin::profiles::{saddle_multipliers, solve_s0, ProfileGrid, ProfileSet};
use phasekin::simulator::{init_traveling, step, Geometry, SimConfig};
use phasekin::{make_quartic, Bar1D, InterfaceData, Poly};

fn bar() -> Bar1D {
    Bar1D { length: 1.0, interface: 0.5, modulus: 16.0, eps_bar: 0.5, body_force: Poly::constant(0.1), u0: 0.0, ul: 0.25375 }
}

fn profiles(c: &mut Criterion) {
    let psi = make_quartic(1.0).unwrap();
    let grid = ProfileGrid::new(30.0, 4001).unwrap();
    let data = InterfaceData::synthetic(&psi, 0.03, 0.07, -0.02, 0.05, 0.04, 0.5, -0.3, 0.2);
    c.bench_function("solve_s0 N=4001", |b| b.iter(|| solve_s0(black_box(&psi), &grid).unwrap()));
    c.bench_function("profile set N=4001", |b| {
        b.iter(|| ProfileSet::solve(black_box(&psi), &data, &grid, 0.04, 1.0).unwrap())
    });
    c.bench_function("saddle multipliers N=4001", |b| {
        b.iter(|| saddle_multipliers(black_box(&psi), &data, &grid, 0.04, 1.0).unwrap())
    });
}

fn tridiagonal(c: &mut Criterion) {
    let n = 10_000;
    let lower = vec![-1.0; n - 1];
    let upper = vec![-1.0; n - 1];
    let diag = vec![2.5; n];
    let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.01).sin()).collect();
    c.bench_function("thomas n=10000", |b| b.iter(|| solve_thomas(&lower, &diag, &upper, black_box(&rhs)).unwrap()));
}

fn residual_sweep(c: &mut Criterion) {
    let psi = make_quartic(1.0).unwrap();
    let grid = ProfileGrid::new(30.0, 4001).unwrap();
    let field = composite_for_bar(&bar(), &psi, &grid, 1e-3, 0.04, 1.0).unwrap();
    c.bench_function("residuals mu=1e-3", |b| b.iter(|| residuals(black_box(&field), &bar()).unwrap()));
}

fn time_step(c: &mut Criterion) {
    let config = SimConfig {
        geometry: Geometry::Planar1d,
        domain: 1.0,
        cells: 1265,
        mu: 1e-3,
        lambda: 0.04,
        mobility: 1.0,
        psi: make_quartic(1.0).unwrap(),
        bar: Some(bar()),
        r0: None,
        dt: None,
        t_end: 0.0,
        output_every: 100,
    };
    let state = init_traveling(&config).unwrap();
    c.bench_function("imex step cells=1265", |b| b.iter(|| step(black_box(&state), &config).unwrap()));
}

criterion_group!(benches, profiles, tridiagonal, residual_sweep, time_step);
criterion_main!(benches);
