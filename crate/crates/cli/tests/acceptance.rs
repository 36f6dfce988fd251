//! One pass/fail line per acceptance criterion. Pass criterion numbers as arguments to run a
//! subset.

#[path = "../../core/tests/props/mod.rs"]
mod core_props;
#[path = "../../solver/tests/props/mod.rs"]
mod solver_props;

use std::time::{Duration, Instant};

use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_soliton_core::affine::Affine;
use torus_soliton_core::catalog;
use torus_soliton_core::exec::Mode;
use torus_soliton_core::invariants::{self, Direction, EtaChoice};
use torus_soliton_core::polytope::Polytope;
use torus_soliton_core::rational::{fmt_q, lcm_denominators, qf, qi, to_f64, Q};
use torus_soliton_core::stability::{self, FamilySpec, Verdict};
use torus_soliton_core::test_config::{self, JtMode, PLConcave};
use torus_soliton_solver::{
    calabi_bound, flow_run, slope_check, Ansatz, ConvexPotential, FlowOptions, Grid, SlopeOptions, SolverError, Weight,
};

const MODE: Mode = Mode::Parallel;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fmt_vec(v: &[Q]) -> String {
    let s: Vec<String> = v.iter().map(fmt_q).collect();
    format!("({})", s.join(", "))
}

fn criterion_1() -> Check {
    let p = catalog::polytope("P2").unwrap();
    let inv = invariants::compute(&p, &EtaChoice::Auto).map_err(|e| e.to_string())?;
    ensure(
        inv.barycenter.iter().all(Zero::is_zero),
        format!("barycenter {}", fmt_vec(&inv.barycenter)),
    )?;
    ensure(inv.futaki.iter().all(Zero::is_zero), "Futaki vector is not zero")?;
    ensure(inv.eta.is_zero(), "eta is not zero")?;
    ensure(inv.m_x == qi(1), format!("m_X = {}", fmt_q(&inv.m_x)))?;
    ensure(inv.reductive, "not Demazure-reductive")?;
    let r = stability::analyze(&p, &FamilySpec::Standard, &EtaChoice::Auto, MODE).map_err(|e| e.to_string())?;
    ensure(
        r.verdict == Verdict::StableOnFamily,
        format!("verdict {}", r.verdict.as_str()),
    )?;
    let eps = r.uniform_epsilon.clone().ok_or("no configuration with J_T > 0")?;
    ensure(eps.is_positive(), format!("min ratio {}", fmt_q(&eps)))?;
    Ok(format!(
        "P2: eta = 0, m_X = 1, {} over {} configurations, min D/J_T = {}",
        r.verdict.as_str(),
        r.evaluations.len(),
        fmt_q(&eps)
    ))
}

fn criterion_2() -> Check {
    let p = catalog::polytope("BL1P2").unwrap();
    let g = catalog::bl1_exceptional_cone(&p).ok_or("no exceptional facet")?;
    let zero = test_config::na_energies(&p, &g, &Direction::zero(2)).map_err(|e| e.to_string())?;
    ensure(
        zero.d_eta_na.is_negative(),
        format!("D^NA = {} with eta = 0", fmt_q(&zero.d_eta_na)),
    )?;
    let eta = invariants::extremal(&p).map_err(|e| e.to_string())?;
    let ext = test_config::na_energies(&p, &g, &eta).map_err(|e| e.to_string())?;
    ensure(ext.d_eta_na.is_zero(), format!("D_eta^NA = {}", fmt_q(&ext.d_eta_na)))?;
    let jt = test_config::jt_min(&p, &g, &eta, JtMode::Plain).map_err(|e| e.to_string())?;
    ensure(jt.value.is_zero(), format!("J_T^NA = {}", fmt_q(&jt.value)))?;
    Ok(format!(
        "eta = 0: D^NA = {}; eta = extremal: D_eta^NA = 0, J_T^NA = 0 at mu* = {} + {}",
        fmt_q(&zero.d_eta_na),
        fmt_vec(&jt.mu_star.mu),
        fmt_q(&jt.mu_star.c)
    ))
}

fn random_config(p: &Polytope, rng: &mut ChaCha8Rng) -> PLConcave {
    let n = p.dim();
    let pieces: Vec<Affine> = (0..rng.random_range(1..=3))
        .map(|_| {
            let a = (0..n).map(|_| qi(rng.random_range(-2..=2))).collect();
            Affine::new(a, qf(rng.random_range(-6..=6), rng.random_range(1..=3)))
        })
        .collect();
    PLConcave::from_creases(p, &pieces, true)
}

/// Least-squares slope of `-log err` against `log k`.
fn order(ks: &[i64], errs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ks.iter().zip(errs).map(|(&k, &e)| ((k as f64).ln(), -e.ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

fn criterion_3() -> Check {
    const KS: [i64; 4] = [6, 12, 24, 48];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_order, mut worst_c, mut exact, mut tested) = (f64::INFINITY, 0.0f64, 0, 0);
    for name in catalog::NAMES
        .iter()
        .filter(|n| catalog::polytope(n).unwrap().dim() == 2)
    {
        let p = catalog::polytope(name).unwrap();
        for i in 0..20 {
            let g = random_config(&p, &mut rng);
            let e = test_config::na_energies(&p, &g, &Direction::zero(2)).map_err(|e| e.to_string())?;
            let errs: Vec<f64> = KS
                .iter()
                .map(|&k| {
                    let w = stability::weight_oracle(&p, &g, &Direction::zero(2), k, MODE);
                    to_f64(&(&w.mean - &e.e_na)).abs()
                })
                .collect();
            tested += 1;
            worst_c = worst_c.max(KS.iter().zip(&errs).map(|(&k, e)| k as f64 * e).fold(0.0, f64::max));
            if errs.iter().all(|&x| x == 0.0) {
                exact += 1;
            } else {
                ensure(
                    errs.iter().all(|&x| x > 0.0),
                    format!("{name} #{i}: error vanishes at some k only: {errs:?}"),
                )?;
                let o = order(&KS, &errs);
                ensure(
                    o >= 0.9,
                    format!("{name} #{i}: empirical order {o:.3}, errors {errs:?}"),
                )?;
                worst_order = worst_order.min(o);
            }
            // k clearing the denominators of the subdivision vertices and of G there
            let sub = g.subdivision(&p).map_err(|e| e.to_string())?;
            let vals: Vec<Q> = sub.vertices.iter().map(|v| g.eval(v)).collect();
            let k = lcm_denominators(sub.vertices.iter().flatten().chain(&vals))
                .to_i64()
                .ok_or("denominator overflow")?;
            let w = stability::weight_oracle(&p, &g, &Direction::zero(2), k, MODE);
            ensure(
                w.max == e.l0_na,
                format!(
                    "{name} #{i}: weight max {} at k = {k}, max G = {}",
                    fmt_q(&w.max),
                    fmt_q(&e.l0_na)
                ),
            )?;
        }
    }
    Ok(format!(
        "{tested} configurations: min order {worst_order:.3}, C = max k|err| = {worst_c:.3}, {exact} exact; L0 max exact at divisible k"
    ))
}

fn random_direction(n: usize, rng: &mut ChaCha8Rng) -> Direction {
    let mut q = || qf(rng.random_range(-20..=20), rng.random_range(1..=12));
    Direction::new((0..n).map(|_| q()).collect(), q())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for e in &catalog::ENTRIES {
        let p = e.polytope();
        let n = p.dim();
        let eta = invariants::extremal(&p).map_err(|e| e.to_string())?;
        let mut dirs: Vec<Direction> = (0..n).map(|i| Direction::basis(n, i)).collect();
        dirs.push(Direction::identity(n));
        dirs.extend((0..100).map(|_| random_direction(n, &mut rng)));
        for mu in &dirs {
            let f = invariants::futaki(&p, mu).map_err(|e| e.to_string())?;
            let pr = invariants::pairing(&p, mu, &eta);
            ensure(
                f == pr,
                format!(
                    "{}: F = {} but <mu, eta> = {} for mu = {}",
                    e.name,
                    fmt_q(&f),
                    fmt_q(&pr),
                    fmt_vec(&mu.coords())
                ),
            )?;
            count += 1;
        }
        let c = invariants::pairing(&p, &Direction::identity(n), &eta);
        ensure(c.is_zero(), format!("{}: <(0,1), eta> = {}", e.name, fmt_q(&c)))?;
    }
    Ok(format!(
        "{count} directions over {} entries; <(0,1), eta> = 0 everywhere",
        catalog::ENTRIES.len()
    ))
}

fn criterion_5() -> Check {
    const NAMES: [&str; 5] = ["E", "E_eta", "L0", "J", "D_eta"];
    let mut rows = 0;
    let mut worst = (0.0f64, String::new());
    for name in ["P1", "P1xP1", "BL1P2"] {
        let p = catalog::polytope(name).unwrap();
        let n = p.dim();
        let eta = invariants::extremal(&p).map_err(|e| e.to_string())?;
        let mut dirs: Vec<(String, Direction)> = (0..n)
            .map(|i| (format!("e{}", i + 1), Direction::basis(n, i)))
            .collect();
        if !eta.is_zero() {
            dirs.push(("eta".into(), eta.clone()));
        }
        for (label, mu) in dirs {
            let out = slope_check(&p, &mu, &eta, &SlopeOptions::for_dim(n), MODE).map_err(|e| e.to_string())?;
            for r in out.iter().filter(|r| NAMES.contains(&r.functional.as_str())) {
                ensure(
                    r.pass,
                    format!(
                        "{name} mu = {label} {}: slope {:.5} vs {:.5}",
                        r.functional, r.slope, r.na
                    ),
                )?;
                rows += 1;
                let gap = if r.na == 0.0 {
                    r.absolute_gap
                } else {
                    r.relative_gap.min(r.absolute_gap)
                };
                if gap > worst.0 {
                    worst = (gap, format!("{name} mu = {label} {}", r.functional));
                }
            }
        }
    }
    Ok(format!(
        "{rows} rows within 2% or 1e-2; largest gap {:.2e} at {}",
        worst.0, worst.1
    ))
}

fn criterion_6() -> Check {
    let p = catalog::polytope("BL1P2").unwrap();
    let eta = invariants::extremal(&p).map_err(|e| e.to_string())?;
    let start = ConvexPotential::reference(Grid::centered(2, 257, 8.0), Ansatz::lattice(&p));
    let run =
        flow_run(&start, Weight::from_direction(&eta), &FlowOptions::default(), MODE).map_err(|e| e.to_string())?;
    let last = run.trace.last().unwrap().diagnostics;
    let bound = calabi_bound(&p, &eta).map_err(|e| e.to_string())?;
    let gap = (last.r.sqrt() - bound).abs() / bound;
    ensure(last.residual < 5e-3, format!("residual {:.3e}", last.residual))?;
    ensure(
        gap <= 0.02,
        format!(
            "sqrt R = {:.5} vs F/|eta| = {:.5} ({:.2}%)",
            last.r.sqrt(),
            bound,
            100.0 * gap
        ),
    )?;

    let start = ConvexPotential::reference(Grid::centered(2, 65, 8.0), Ansatz::lattice(&p));
    let zero = match flow_run(&start, Weight::trivial(), &FlowOptions::default(), MODE) {
        Err(SolverError::NotConverged(r)) => r,
        Ok(_) => return Err("flow with eta = 0 converged".into()),
        Err(e) => return Err(e.to_string()),
    };
    let tr = &zero.trace;
    ensure(
        tr.windows(2).all(|w| w[1].diagnostics.d <= w[0].diagnostics.d + 1e-9),
        "D increased along the eta = 0 flow",
    )?;
    // D over the last doubling of t
    let t_end = tr.last().unwrap().t;
    let mid = tr.iter().rev().find(|r| r.t <= t_end / 2.0).ok_or("trace too short")?;
    let drop = mid.diagnostics.d - tr.last().unwrap().diagnostics.d;
    ensure(
        drop > 0.01,
        format!("D stabilizes: drop {drop:.4} over the last doubling of t"),
    )?;
    Ok(format!(
        "eta extremal: residual {:.3e}, sqrt R {:.5} vs {:.5} ({:.2}%) after {} steps; eta = 0: not converged, D = {:.4}, still falling {:.3} per doubling of t",
        last.residual,
        last.r.sqrt(),
        bound,
        100.0 * gap,
        run.trace.len() - 1,
        tr.last().unwrap().diagnostics.d,
        drop
    ))
}

fn run_suite<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new(config);
    runner.run(&strategy, test).map_err(|e| e.to_string())?;
    Ok(cases)
}

fn criterion_7() -> Check {
    use core_props::*;
    let mut total = 0;
    total += run_suite(2000, (surface(), prop::collection::vec(-5i64..=5, 4)), |(p, x)| {
        gram_is_positive_definite(p, x)
    })?;
    total += run_suite(
        2000,
        (with_config(), prop::collection::vec((rational(), rational()), 3)),
        |((p, g), s)| twists_add(p, g, s),
    )?;
    total += run_suite(2000, (with_config(), direction(2), direction(2)), |((p, g), e, m)| {
        d_eta_is_translation_equivariant(p, g, e, m)
    })?;
    total += run_suite(1000, (with_config(), direction(2)), |((p, g), s)| {
        j_eta_is_nonnegative_when_m_x_is_positive(p, g, s)
    })?;
    total += run_suite(1000, (with_config(), any::<bool>()), |((p, g), b)| {
        jt_min_certificates_verify(p, g, b)
    })?;
    total += run_suite(
        1000,
        solver_props::flow_input(),
        solver_props::flow_decreases_d_eta_and_r,
    )?;
    total += run_suite(
        1000,
        solver_props::potential_input(),
        solver_props::m_eta_dominates_d_eta,
    )?;
    Ok(format!("7 properties, {total} generated cases, 0 failures"))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Check); 7] = [
        (1, "exact P2 pipeline", Duration::from_secs(1), criterion_1),
        (2, "BL1P2 dichotomy", Duration::from_secs(5), criterion_2),
        (3, "weight oracle equivalence", Duration::from_secs(60), criterion_3),
        (4, "extremal identity", Duration::from_secs(60), criterion_4),
        (5, "archimedean slopes", Duration::from_secs(600), criterion_5),
        (6, "soliton flow on BL1P2", Duration::from_secs(1800), criterion_6),
        (7, "property suites", Duration::from_secs(300), criterion_7),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, title, limit, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let result = check();
        let el = t.elapsed();
        let (ok, detail) = match result {
            Ok(d) if el <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {:.0} s limit", limit.as_secs_f64())),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {id} {}: {title}: {detail} [{:.2} s]",
            if ok { "PASS" } else { "FAIL" },
            el.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
