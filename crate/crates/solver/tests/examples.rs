use torus_soliton_core::catalog;
use torus_soliton_core::exec::Mode;
use torus_soliton_core::invariants::extremal;
use torus_soliton_core::Direction;
use torus_soliton_solver::functionals::Evaluator;
use torus_soliton_solver::io::{read_grid_json, write_grid_json, write_trace_csv};
use torus_soliton_solver::newton::{self, NewtonOptions};
use torus_soliton_solver::*;

const MODE: Mode = Mode::Parallel;

fn p1_start(n: usize) -> ConvexPotential {
    let g = Grid::centered(1, n, 8.0);
    let base = ConvexPotential::reference(g.clone(), Ansatz::lattice(&catalog::polytope("P1").unwrap()));
    let u = (0..g.len())
        .map(|k| 0.1 * (-(g.coord(k)[0] - 1.0).powi(2)).exp())
        .collect();
    base.with_u(u)
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn round_line_potential_is_kahler_einstein() {
    // h = 16 / 4096 = 1/256
    let g = Grid::centered(1, 4097, 8.0);
    let psi = ConvexPotential::reference(g, Ansatz::projective_line());
    let r = ricci_potential(&psi, MODE).unwrap();
    assert!(sup_abs(&r.rho) <= 1e-6, "max |rho| = {:e}", sup_abs(&r.rho));
}

#[test]
fn bump_gives_nonzero_normalized_ricci_potential() {
    let g = Grid::centered(1, 513, 8.0);
    let base = ConvexPotential::reference(g.clone(), Ansatz::projective_line());
    let u = (0..g.len()).map(|k| 0.1 * (-g.coord(k)[0].powi(2)).exp()).collect();
    let psi = base.with_u(u);
    let r = ricci_potential(&psi, MODE).unwrap();
    assert!(sup_abs(&r.rho) > 1e-2);
    assert!(r.normalization_defect(&g.weights()).abs() < 1e-8);
}

#[test]
fn normalization_holds_in_two_dimensions() {
    let p = catalog::polytope("BL1P2").unwrap();
    let g = Grid::centered(2, 65, 8.0);
    let base = ConvexPotential::reference(g.clone(), Ansatz::lattice(&p));
    let u = (0..g.len())
        .map(|k| {
            let y = g.coord(k);
            0.05 * (-(y[0] * y[0] + y[1] * y[1]) / 4.0).exp()
        })
        .collect();
    let r = ricci_potential(&base.with_u(u), MODE).unwrap();
    assert!(r.normalization_defect(&g.weights()).abs() < 1e-8);
}

#[test]
fn degenerate_hessian_is_reported() {
    let g = Grid::centered(1, 65, 8.0);
    let base = ConvexPotential::reference(g.clone(), Ansatz::projective_line());
    let u = (0..g.len()).map(|k| -2.0 * (-g.coord(k)[0].powi(2)).exp()).collect();
    assert!(matches!(
        ricci_potential(&base.with_u(u), MODE),
        Err(SolverError::DegenerateHessian { .. })
    ));
}

#[test]
fn line_flow_converges_to_kahler_einstein() {
    let opts = FlowOptions {
        tol: 1e-4,
        ..Default::default()
    };
    let run = flow_run(&p1_start(257), Weight::trivial(), &opts, MODE).unwrap();
    let last = run.trace.last().unwrap().diagnostics;
    assert!(run.converged && last.residual < 1e-4, "residual {:e}", last.residual);
    assert!(last.r < 1e-7, "R = {:e}", last.r);
    for w in run.trace.windows(2) {
        assert!(w[1].diagnostics.d_eta <= w[0].diagnostics.d_eta + 1e-9);
        assert!(w[1].diagnostics.m_eta >= w[1].diagnostics.d_eta - 1e-12);
    }
    assert!((last.m_eta - last.d_eta).abs() < 1e-3);
}

#[test]
fn newton_agrees_with_the_flow() {
    let start = p1_start(257);
    let nr = newton::solve(&start, Weight::trivial(), &NewtonOptions::default(), MODE).unwrap();
    assert!(nr.converged && nr.residual < 1e-6, "newton residual {:e}", nr.residual);
    let opts = FlowOptions {
        tol: 1e-4,
        ..Default::default()
    };
    let fr = flow_run(&start, Weight::trivial(), &opts, MODE).unwrap();
    let ev = Evaluator::new(&start, Weight::trivial(), MODE);
    let dn = ev.evaluate(&nr.potential).unwrap();
    let df = ev.evaluate(&fr.potential).unwrap();
    assert!((dn.d - df.d).abs() < 1e-5, "D newton {} flow {}", dn.d, df.d);
}

#[test]
fn newton_rejects_surfaces() {
    let p = catalog::polytope("P2").unwrap();
    let psi = ConvexPotential::reference(Grid::centered(2, 17, 8.0), Ansatz::lattice(&p));
    let r = newton::solve(&psi, Weight::trivial(), &NewtonOptions::default(), MODE);
    assert!(matches!(r, Err(SolverError::Unsupported(_))));
}

#[test]
fn reference_energies_vanish() {
    let psi = ConvexPotential::reference(
        Grid::centered(1, 257, 8.0),
        Ansatz::lattice(&catalog::polytope("P1").unwrap()),
    );
    let d = functionals(&psi, Weight::trivial(), false, MODE).unwrap();
    for x in [d.e, d.j, d.i_ref, d.d, d.l] {
        assert!(x.abs() < 1e-12, "{d:?}");
    }
}

#[test]
fn constants_shift_e_and_l_only() {
    let psi = p1_start(257);
    let c = 0.75;
    let shifted = psi.with_u(psi.u.iter().map(|x| x + c).collect());
    let ev = Evaluator::new(&psi, Weight::trivial(), MODE);
    let (a, b) = (ev.evaluate(&psi).unwrap(), ev.evaluate(&shifted).unwrap());
    assert!((b.e - a.e - c).abs() < 1e-9);
    assert!((b.l - a.l - c).abs() < 1e-9);
    assert!((b.j - a.j).abs() < 1e-9);
    assert!((b.d - a.d).abs() < 1e-9);
}

#[test]
fn translations_are_minimized_away() {
    let psi = ConvexPotential::reference(
        Grid::centered(1, 257, 8.0),
        Ansatz::lattice(&catalog::polytope("P1").unwrap()),
    )
    .translated([0.5, 0.0]);
    let d = functionals(&psi, Weight::trivial(), true, MODE).unwrap();
    assert!(d.j > 1e-3, "J = {}", d.j);
    assert!(d.j_t <= 1e-4, "J_T = {:e}", d.j_t);
}

#[test]
fn first_variation_of_e_is_the_monge_ampere_measure() {
    // h = 1/128
    let psi = p1_start(2049);
    let g = psi.grid.clone();
    let delta: Vec<f64> = (0..g.len()).map(|k| (-(g.coord(k)[0] + 0.5).powi(2)).exp()).collect();
    let ev = Evaluator::new(&psi, Weight::trivial(), MODE);
    let eps = 1e-4;
    let at = |s: f64| {
        let u = psi.u.iter().zip(&delta).map(|(a, b)| a + s * b).collect();
        ev.evaluate(&psi.with_u(u)).unwrap().e
    };
    let fd = (at(eps) - at(-eps)) / (2.0 * eps);
    let r = ricci_potential(&psi, MODE).unwrap();
    let w = g.weights();
    let exact: f64 = (0..g.len()).map(|k| w[k] * delta[k] * r.det[k]).sum::<f64>() / ev.reference_mass();
    assert!((fd - exact).abs() < 1e-6, "fd {fd} exact {exact}");
}

#[test]
fn monge_ampere_mass_is_the_volume() {
    for (name, n) in [("P1", 257), ("P1xP1", 97), ("P2", 97), ("BL1P2", 97)] {
        let p = catalog::polytope(name).unwrap();
        let vol = torus_soliton_core::rational::to_f64(&p.volume());
        let psi = ConvexPotential::reference(Grid::centered(p.dim(), n, 8.0), Ansatz::lattice(&p));
        let mass = functionals(&psi, Weight::trivial(), false, MODE).unwrap().mass;
        assert!((mass - vol).abs() <= 5e-3 * vol, "{name}: mass {mass} vol {vol}");
    }
}

#[test]
fn line_slopes_match_exact_values() {
    let p = catalog::polytope("P1").unwrap();
    let eta = Direction::zero(1);
    let rows = slope_check(&p, &Direction::basis(1, 0), &eta, &SlopeOptions::for_dim(1), MODE).unwrap();
    let get = |n: &str| rows.iter().find(|r| r.functional == n).unwrap();
    assert!(get("E").slope.abs() < 1e-2);
    assert!((get("L0").slope - 1.0).abs() < 1e-2);
    assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
}

#[test]
fn extremal_direction_is_futaki_null_along_its_ray() {
    let p = catalog::polytope("BL1P2").unwrap();
    let eta = extremal(&p).unwrap();
    let opts = SlopeOptions {
        nodes: 97,
        translations: false,
        ..SlopeOptions::for_dim(2)
    };
    let rows = slope_check(&p, &eta, &eta, &opts, MODE).unwrap();
    let d = rows.iter().find(|r| r.functional == "D_eta").unwrap();
    assert!(d.na == 0.0 && d.pass, "{d:?}");
}

#[test]
fn blowup_without_soliton_vector_does_not_converge() {
    let p = catalog::polytope("BL1P2").unwrap();
    let start = ConvexPotential::reference(Grid::centered(2, 65, 8.0), Ansatz::lattice(&p));
    let opts = FlowOptions {
        steps: 60,
        ..Default::default()
    };
    match flow_run(&start, Weight::trivial(), &opts, MODE) {
        Err(SolverError::NotConverged(run)) => {
            let d: Vec<f64> = run.trace.iter().map(|r| r.diagnostics.d).collect();
            assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-9));
            assert!(*d.last().unwrap() < -0.2, "D = {d:?}");
        }
        other => panic!("expected NotConverged, got {other:?}"),
    }
}

#[test]
fn nonpositive_weight_is_refused() {
    let p = catalog::polytope("P1").unwrap();
    let psi = ConvexPotential::reference(Grid::centered(1, 65, 8.0), Ansatz::lattice(&p));
    let w = Weight { mu: [3.0, 0.0], c: 0.0 };
    assert!(matches!(
        flow_run(&psi, w, &FlowOptions::default(), MODE),
        Err(SolverError::Invalid(_))
    ));
}

#[test]
fn dumps_round_trip() {
    let psi = p1_start(65);
    let mut buf = Vec::new();
    write_grid_json(&mut buf, &psi).unwrap();
    let back = read_grid_json(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back, psi);

    let run = flow_run(
        &psi,
        Weight::trivial(),
        &FlowOptions {
            steps: 3,
            tol: 0.0,
            ..Default::default()
        },
        MODE,
    );
    let trace = match run {
        Ok(r) => r.trace,
        Err(SolverError::NotConverged(r)) => r.trace,
        Err(e) => panic!("{e}"),
    };
    let mut csv = Vec::new();
    write_trace_csv(&mut csv, &trace).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("step,t,dt,residual,R,D_eta,D,J,H,M_eta"));
    assert_eq!(text.lines().count(), trace.len() + 1);
}

#[test]
fn sequential_and_parallel_agree() {
    let p = catalog::polytope("P2").unwrap();
    let g = Grid::centered(2, 33, 8.0);
    let psi = ConvexPotential::reference(g, Ansatz::lattice(&p));
    let a = functionals(&psi, Weight::trivial(), false, Mode::Sequential).unwrap();
    let b = functionals(&psi, Weight::trivial(), false, Mode::Parallel).unwrap();
    assert!((a.l - b.l).abs() < 1e-12 && (a.r - b.r).abs() < 1e-12);
}
