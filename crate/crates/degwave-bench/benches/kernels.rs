//! Microbenchmarks of the hot kernels: one midpoint step, the C_HP
//! eigensolve, and the operator application.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use degwave::{
    estimate_chp, CoefficientProfile, CoefficientSet, DiscreteOperator, Grid, Stepper, WaveState,
};
use std::hint::black_box;

fn sqrt_set() -> CoefficientSet {
    CoefficientSet::new(
        CoefficientProfile::power(0.5, 1.0),
        CoefficientProfile::power(0.5, 0.2),
        CoefficientProfile::power(0.5, 1.0),
        0.1,
    )
    .unwrap()
}

fn bench_step(c: &mut Criterion) {
    let grid = Grid::build(&sqrt_set(), 400).unwrap();
    let stepper = Stepper::new(grid.clone(), 0.1, grid.h).unwrap();
    let pi = std::f64::consts::PI;
    let y0: Vec<f64> = grid.nodes.iter().map(|&x| (pi * x).sin()).collect();
    let state = WaveState::new(y0, vec![0.0; grid.n]).unwrap();
    c.bench_function("midpoint_step_n400", |b| {
        b.iter_batched(
            || state.clone(),
            |mut s| {
                stepper.step(&mut s, 0.0, 0.0).unwrap();
                black_box(s)
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_chp(c: &mut Criterion) {
    let grid = Grid::build(&sqrt_set(), 2048).unwrap();
    c.bench_function("chp_eigensolve_n2048", |b| {
        b.iter(|| black_box(estimate_chp(&grid).unwrap()))
    });
}

fn bench_operator(c: &mut Criterion) {
    let grid = Grid::build(&sqrt_set(), 400).unwrap();
    let op = DiscreteOperator::new(grid.clone(), 0.1);
    let u: Vec<f64> = grid.nodes.iter().map(|&x| x * (1.0 - x)).collect();
    c.bench_function("operator_apply_n400", |b| {
        b.iter(|| black_box(op.apply(&u).unwrap()))
    });
}

criterion_group!(benches, bench_step, bench_chp, bench_operator);
criterion_main!(benches);
