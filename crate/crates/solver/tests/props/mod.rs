//! Strategies and property bodies shared by the property suite and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use torus_soliton_core::catalog;
use torus_soliton_core::exec::Mode;
use torus_soliton_solver::*;

const MODE: Mode = Mode::Sequential;

type Outcome = Result<(), TestCaseError>;

/// A Gaussian bump added to the lattice reference of `name`.
pub fn bumped(name: &str, n: usize, amp: f64, centre: [f64; 2], width: f64) -> ConvexPotential {
    let p = catalog::polytope(name).unwrap();
    let g = Grid::centered(p.dim(), n, 8.0);
    let base = ConvexPotential::reference(g.clone(), Ansatz::lattice(&p));
    let u = (0..g.len())
        .map(|k| {
            let y = g.coord(k);
            let r2 = (y[0] - centre[0]).powi(2) + if p.dim() == 2 { (y[1] - centre[1]).powi(2) } else { 0.0 };
            amp * (-r2 / (width * width)).exp()
        })
        .collect();
    base.with_u(u)
}

fn trace_of(r: Result<FlowRun, SolverError>) -> Vec<flow::TraceRow> {
    match r {
        Ok(run) => run.trace,
        Err(SolverError::NotConverged(run)) => run.trace,
        Err(e) => panic!("{e}"),
    }
}

pub fn flow_input() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-0.1f64..0.1, -2.0f64..2.0, 0.8f64..2.0, 0.05f64..1.0)
}

pub fn flow_decreases_d_eta_and_r((amp, centre, width, dt): (f64, f64, f64, f64)) -> Outcome {
    let psi = bumped("P1", 65, amp, [centre, 0.0], width);
    prop_assume!(ricci_potential(&psi, MODE).is_ok());
    let opts = FlowOptions {
        dt,
        steps: 8,
        tol: 0.0,
        ..Default::default()
    };
    let trace = trace_of(flow_run(&psi, Weight::trivial(), &opts, MODE));
    for w in trace.windows(2) {
        let (a, b) = (&w[0].diagnostics, &w[1].diagnostics);
        prop_assert!(b.d_eta <= a.d_eta + 1e-9, "D_eta {} -> {}", a.d_eta, b.d_eta);
        prop_assert!(b.r <= a.r + 1e-9, "R {} -> {}", a.r, b.r);
    }
    Ok(())
}

pub fn potential_input() -> impl Strategy<Value = (usize, f64, [f64; 2], f64, [f64; 2])> {
    (
        0usize..4,
        -0.1f64..0.1,
        prop::array::uniform2(-2.0f64..2.0),
        0.8f64..2.5,
        prop::array::uniform2(-0.3f64..0.3),
    )
}

pub fn m_eta_dominates_d_eta((surface, amp, centre, width, mu): (usize, f64, [f64; 2], f64, [f64; 2])) -> Outcome {
    let name = ["P1", "P1xP1", "P2", "BL1P2"][surface];
    let n = if name == "P1" { 129 } else { 25 };
    let psi = bumped(name, n, amp, centre, width);
    prop_assume!(ricci_potential(&psi, MODE).is_ok());
    let mu = if psi.dim() == 1 { [mu[0], 0.0] } else { mu };
    let d = functionals(&psi, Weight { mu, c: 0.0 }, false, MODE).unwrap();
    prop_assert!(d.m_eta >= d.d_eta - 1e-12, "M {} < D {}", d.m_eta, d.d_eta);
    Ok(())
}
