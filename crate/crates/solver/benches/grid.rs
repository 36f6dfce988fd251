use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torus_soliton_core::catalog;
use torus_soliton_core::exec::Mode;
use torus_soliton_core::invariants::extremal;
use torus_soliton_solver::*;

fn start(n: usize) -> (ConvexPotential, Weight) {
    let p = catalog::polytope("BL1P2").unwrap();
    let psi = ConvexPotential::reference(Grid::centered(2, n, 8.0), Ansatz::lattice(&p));
    (psi, Weight::from_direction(&extremal(&p).unwrap()))
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("bl1_sweeps");
    g.sample_size(10);
    for n in [65, 129] {
        let (psi, w) = start(n);
        for (label, mode) in [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)] {
            g.bench_with_input(BenchmarkId::new(format!("ricci/{label}"), n), &psi, |b, psi| {
                b.iter(|| ricci_potential(psi, mode).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("functionals/{label}"), n), &psi, |b, psi| {
                b.iter(|| functionals(psi, w, false, mode).unwrap())
            });
        }
    }
    g.finish();
}

fn steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("bl1_flow_5_steps");
    g.sample_size(10);
    let (psi, w) = start(65);
    let opts = FlowOptions {
        steps: 5,
        tol: 0.0,
        ..Default::default()
    };
    for (label, mode) in [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)] {
        g.bench_function(label, |b| b.iter(|| flow_run(&psi, w, &opts, mode)));
    }
    g.finish();
}

criterion_group!(benches, sweeps, steps);
criterion_main!(benches);
