//! Compares the parallel sweep dispatch against the sequential path on a
//! small two-mesh sweep, and times a single march for reference.

use criterion::{criterion_group, criterion_main, Criterion};

use shishkin_rd::analysis::{run_sweep_serial, Axis, SweepConfig};
use shishkin_rd::mesh::{build_space_mesh, build_time_mesh};
use shishkin_rd::problem::example_problem;
use shishkin_rd::solver::march;

#[cfg(feature = "parallel")]
use shishkin_rd::analysis::run_sweep;

fn small_sweep() -> SweepConfig {
    SweepConfig {
        axis: Axis::Time,
        fixed_n: 32,
        fixed_m: 0,
        refine_values: vec![8, 16, 32],
        epsilons: vec![2f64.powi(-6), 2f64.powi(-10), 2f64.powi(-14)],
        problem: example_problem(2f64.powi(-14)),
    }
}

fn bench_sweep(c: &mut Criterion) {
    let cfg = small_sweep();
    let mut group = c.benchmark_group("two_mesh_sweep");
    group.bench_function("serial", |b| {
        b.iter(|| run_sweep_serial(&cfg).unwrap());
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| run_sweep(&cfg).unwrap());
    });
    group.finish();
}

fn bench_march(c: &mut Criterion) {
    let p = example_problem(2f64.powi(-14));
    let sm = build_space_mesh(p.epsilon, p.alpha, 64).unwrap();
    let tm = build_time_mesh(p.t_final, 256).unwrap();
    c.bench_function("march_64x256", |b| {
        b.iter(|| march(&p, &sm, &tm).unwrap());
    });
}

criterion_group!(benches, bench_sweep, bench_march);
criterion_main!(benches);
