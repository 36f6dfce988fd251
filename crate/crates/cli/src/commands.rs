use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use torus_soliton_core::catalog;
use torus_soliton_core::exec::Mode;
use torus_soliton_core::invariants::{self, Direction, EtaChoice, Face};
use torus_soliton_core::json::{
    parse_eta_mode, parse_vec, DirectionJson, EnergiesJson, EvaluationJson, JtMinJson, PolytopeJson, ReportJson,
};
use torus_soliton_core::polytope::Polytope;
use torus_soliton_core::rational::{fmt_q, parse_q, to_f64};
use torus_soliton_core::stability::{self, Budget, FamilySpec, SearchError};
use torus_soliton_core::test_config::{self, normal_cone, JtMode, PLConcave, PLConfigJson};
use torus_soliton_solver::io::{read_grid_json, write_grid_json, write_trace_csv};
use torus_soliton_solver::newton::{self, NewtonOptions};
use torus_soliton_solver::{
    calabi_bound, flow_run, Ansatz, ConvexPotential, FlowOptions, Grid, SlopeOptions, SlopeRow, SolverError, Weight,
};

use crate::args::*;
use crate::{golden, CliError, EXIT_FAILED};

type Outcome = Result<i32, CliError>;

/// A catalog name, or a path to a polytope JSON file.
pub fn load_polytope(target: &str) -> Result<(Polytope, Option<String>), CliError> {
    if let Ok(e) = catalog::entry(target) {
        return Ok((e.polytope(), Some(e.name.to_string())));
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "{target:?} is neither a catalog entry nor a file"
        )));
    }
    let pj: PolytopeJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    let name = pj.name.clone();
    Ok((pj.build()?, name))
}

fn eta_of(s: &str, p: &Polytope) -> Result<(EtaChoice, Direction), CliError> {
    let choice = parse_eta_mode(s, p)?;
    let eta = choice.resolve(p)?;
    Ok((choice, eta))
}

/// `eta`, or `mu_1,...,mu_n[,c]` with `c = 0` when omitted.
pub fn parse_direction(s: &str, p: &Polytope, eta: &Direction) -> Result<Direction, CliError> {
    if s.trim() == "eta" {
        return Ok(eta.clone());
    }
    let parts: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
    let v = parse_vec(&parts)?;
    let n = p.dim();
    match v.len() {
        l if l == n => Ok(Direction::new(v, Default::default())),
        l if l == n + 1 => Ok(Direction::from_coords(&v)),
        _ => Err(CliError::Usage(format!("direction needs {n} or {} entries", n + 1))),
    }
}

fn parse_cone(s: &str, p: &Polytope) -> Result<PLConcave, CliError> {
    if s.trim() == "exceptional" {
        return catalog::bl1_exceptional_cone(p).ok_or_else(|| CliError::Usage("no facet with normal (-1,-1)".into()));
    }
    let (facets, fraction) = s
        .split_once('@')
        .ok_or_else(|| CliError::Usage(format!("cone {s:?} is not FACETS@FRACTION")))?;
    let mut ids = facets
        .split('+')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad facet index {x:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ids.sort_unstable();
    let face = Face { facets: ids };
    if !invariants::proper_faces(p).contains(&face) {
        return Err(CliError::Usage(format!("facets {facets} do not cut out a face")));
    }
    let q = parse_q(fraction.trim()).map_err(torus_soliton_core::Error::from)?;
    Ok(normal_cone(p, &face, &q))
}

fn load_config(src: &ConfigSource, p: &Polytope, eta: &Direction) -> Result<PLConcave, CliError> {
    if let Some(c) = &src.config {
        let text = if c.trim_start().starts_with('{') {
            c.clone()
        } else {
            fs::read_to_string(c)?
        };
        let j: PLConfigJson = serde_json::from_str(&text)?;
        return Ok(j.build(p)?);
    }
    if let Some(m) = &src.mu {
        return Ok(PLConcave::product(&parse_direction(m, p, eta)?));
    }
    parse_cone(src.cone.as_deref().unwrap_or_default(), p)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Write to `dest`, with `-` meaning `out`.
fn emit(dest: &str, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    if dest == "-" {
        out.write_all(text.as_bytes())?;
    } else {
        fs::write(dest, text)?;
    }
    Ok(())
}

pub fn analyze(a: &AnalyzeArgs, mode: Mode, out: &mut dyn Write) -> Outcome {
    let (p, name, choice, spec, stored) = match &a.from_report {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let rj: ReportJson = serde_json::from_str(&text)?;
            let (p, choice, spec) = rj.inputs()?;
            (p, rj.polytope.name.clone(), choice, spec, Some(text))
        }
        None => {
            let (p, name) = load_polytope(a.target.as_deref().unwrap_or_default())?;
            let choice = parse_eta_mode(&a.eta, &p)?;
            let spec = match a.family {
                FamilyArg::Standard => FamilySpec::Standard,
                FamilyArg::Products => FamilySpec::Products,
                FamilyArg::NormalCones => FamilySpec::NormalCones,
            };
            (p, name, choice, spec, None)
        }
    };
    let report = stability::analyze(&p, &spec, &choice, mode)?;
    let rj = ReportJson::from_report(&report, &p, name.as_deref(), &choice);
    let text = pretty(&rj);
    let to_stdout = a.emit_json.as_deref() == Some("-");
    if let Some(dest) = &a.emit_json {
        emit(dest, &text, out)?;
    }
    if !to_stdout {
        writeln!(out, "polytope   {}", name.as_deref().unwrap_or("(file)"))?;
        writeln!(out, "barycenter [{}]", rj.barycenter.join(", "))?;
        writeln!(out, "eta        [{}] + {}", rj.eta.mu.join(", "), rj.eta.c)?;
        writeln!(out, "m_X        {}", rj.m_x)?;
        writeln!(out, "reductive  {}", rj.reductive)?;
        writeln!(
            out,
            "family     {} ({} configurations)",
            rj.family,
            rj.configurations.len()
        )?;
        if let Some(e) = report.destabilizer() {
            writeln!(
                out,
                "destabilizer {} with D_eta = {}",
                e.label,
                fmt_q(&e.energies.d_eta_na)
            )?;
        }
        if let Some(eps) = &rj.uniform_epsilon {
            writeln!(out, "min D_eta / J_T = {eps}")?;
        }
        writeln!(out, "verdict    {}", rj.verdict)?;
    }
    if let Some(stored) = stored {
        if stored != text {
            if !to_stdout {
                writeln!(out, "round trip: differs from the stored report")?;
            }
            return Ok(EXIT_FAILED);
        }
        if !to_stdout {
            writeln!(out, "round trip: identical")?;
        }
    }
    Ok(report.verdict.exit_code())
}

#[derive(Serialize)]
struct TcOut {
    polytope: PolytopeJson,
    eta: DirectionJson,
    config: PLConfigJson,
    energies: EnergiesJson,
}

pub fn eval_tc(a: &TcArgs, out: &mut dyn Write) -> Outcome {
    let (p, name) = load_polytope(&a.target)?;
    p.require_reflexive()?;
    let (_, eta) = eta_of(&a.eta, &p)?;
    let g = load_config(&a.source, &p, &eta)?;
    let e = test_config::na_energies(&p, &g, &eta)?;
    let o = TcOut {
        polytope: PolytopeJson::from_polytope(&p, name.as_deref()),
        eta: DirectionJson::from_direction(&eta),
        config: g.to_json(false),
        energies: EnergiesJson::from_energies(&e),
    };
    out.write_all(pretty(&o).as_bytes())?;
    Ok(0)
}

#[derive(Serialize)]
struct JtOut {
    config: PLConfigJson,
    mode: &'static str,
    jt_min: JtMinJson,
    certificate_verified: bool,
}

pub fn jt_min(a: &JtArgs, out: &mut dyn Write) -> Outcome {
    let (p, _) = load_polytope(&a.tc.target)?;
    p.require_reflexive()?;
    let (_, eta) = eta_of(&a.tc.eta, &p)?;
    let g = load_config(&a.tc.source, &p, &eta)?;
    let (mode, label) = match a.mode {
        JtModeArg::Plain => (JtMode::Plain, "plain"),
        JtModeArg::Eta => (JtMode::Eta, "eta"),
    };
    let jt = test_config::jt_min(&p, &g, &eta, mode)?;
    let ok = test_config::verify_certificate(&g.subdivision(&p)?, &g, &jt);
    let o = JtOut {
        config: g.to_json(false),
        mode: label,
        jt_min: JtMinJson::from_jt(&jt),
        certificate_verified: ok,
    };
    out.write_all(pretty(&o).as_bytes())?;
    Ok(if ok { 0 } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct SearchOut {
    examined: usize,
    budget_exhausted: bool,
    destabilizer: Option<EvaluationJson>,
    best: Option<EvaluationJson>,
}

pub fn destabilize(a: &DestabilizeArgs, mode: Mode, out: &mut dyn Write) -> Outcome {
    let (p, _) = load_polytope(&a.target)?;
    let (_, eta) = eta_of(&a.eta, &p)?;
    let budget = Budget {
        max_pieces: a.max_pieces,
        max_denominator: a.max_denominator,
        max_candidates: a.max_candidates,
    };
    let seed = a.randomize.then_some(a.seed);
    let (o, code) = match stability::destabilizer_search(&p, &eta, &budget, seed, mode) {
        Ok(s) => {
            let code = if s.destabilizer.is_some() { 2 } else { 0 };
            let o = SearchOut {
                examined: s.examined,
                budget_exhausted: false,
                destabilizer: s.destabilizer.as_ref().map(EvaluationJson::from_eval),
                best: s.best.as_ref().map(EvaluationJson::from_eval),
            };
            (o, code)
        }
        Err(SearchError::Budget(b)) => {
            let o = SearchOut {
                examined: b.examined,
                budget_exhausted: true,
                destabilizer: None,
                best: b.best.as_ref().map(EvaluationJson::from_eval),
            };
            (o, EXIT_FAILED)
        }
        Err(SearchError::Domain(e)) => return Err(e.into()),
    };
    out.write_all(pretty(&o).as_bytes())?;
    Ok(code)
}

fn flow_start(a: &FlowArgs, p: &Polytope, default_nodes: usize) -> Result<ConvexPotential, CliError> {
    if let Some(path) = &a.start {
        let psi = read_grid_json(&fs::read_to_string(path)?)?;
        if psi.dim() != p.dim() {
            return Err(CliError::Usage("start dump has the wrong dimension".into()));
        }
        return Ok(psi);
    }
    let n = a.grid.unwrap_or(default_nodes);
    if n < 5 || a.radius.is_nan() || a.radius <= 0.0 {
        return Err(CliError::Usage("need --grid >= 5 and --box > 0".into()));
    }
    Ok(ConvexPotential::reference(
        Grid::centered(p.dim(), n, a.radius),
        Ansatz::lattice(p),
    ))
}

fn check_dim(p: &Polytope) -> Result<(), CliError> {
    if (1..=2).contains(&p.dim()) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "grids support dimension 1 or 2, got {}",
            p.dim()
        )))
    }
}

pub fn flow(a: &FlowArgs, mode: Mode, out: &mut dyn Write) -> Outcome {
    let (p, _) = load_polytope(&a.target)?;
    check_dim(&p)?;
    let (_, eta) = eta_of(&a.eta, &p)?;
    let start = flow_start(a, &p, if p.dim() == 1 { 257 } else { 129 })?;
    let defaults = FlowOptions::default();
    let opts = FlowOptions {
        dt: a.dt,
        tol: a.tol.unwrap_or(defaults.tol),
        steps: a.steps.unwrap_or(defaults.steps),
        monotone_r: a.monotone_r,
        ..defaults
    };
    let (run, converged) = match flow_run(&start, Weight::from_direction(&eta), &opts, mode) {
        Ok(r) => (r, true),
        Err(SolverError::NotConverged(r)) => (*r, false),
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &a.trace {
        write_trace_csv(fs::File::create(path)?, &run.trace)?;
    }
    if let Some(path) = &a.dump {
        write_grid_json(fs::File::create(path)?, &run.potential)?;
    }
    let last = run.trace.last().expect("trace has the initial row").diagnostics;
    let bound = calabi_bound(&p, &eta)?;
    writeln!(
        out,
        "steps      {} accepted, {} rejected",
        run.trace.len() - 1,
        run.rejected
    )?;
    writeln!(out, "residual   {:.6e}", last.residual)?;
    writeln!(out, "R          {:.6e}  (sqrt {:.6})", last.r, last.r.sqrt())?;
    if bound > 0.0 {
        let gap = (last.r.sqrt() - bound).abs() / bound;
        writeln!(out, "F(eta)/|eta| {:.6}  (gap {:.3}%)", bound, 100.0 * gap)?;
    }
    writeln!(out, "D_eta      {:.9}", last.d_eta)?;
    writeln!(out, "D          {:.9}", last.d)?;
    writeln!(out, "M_eta      {:.9}", last.m_eta)?;
    writeln!(out, "converged  {converged}")?;
    Ok(if converged { 0 } else { EXIT_FAILED })
}

pub fn solve(a: &FlowArgs, mode: Mode, out: &mut dyn Write) -> Outcome {
    let (p, _) = load_polytope(&a.target)?;
    check_dim(&p)?;
    let (_, eta) = eta_of(&a.eta, &p)?;
    let start = flow_start(a, &p, 257)?;
    let defaults = NewtonOptions::default();
    let opts = NewtonOptions {
        tol: a.tol.unwrap_or(defaults.tol),
        max_iter: a.steps.unwrap_or(defaults.max_iter),
    };
    let run = newton::solve(&start, Weight::from_direction(&eta), &opts, mode)?;
    if let Some(path) = &a.dump {
        write_grid_json(fs::File::create(path)?, &run.potential)?;
    }
    for (i, r) in run.history.iter().enumerate() {
        writeln!(out, "iteration {i:3}  equation residual {r:.6e}")?;
    }
    writeln!(out, "soliton residual {:.6e}", run.residual)?;
    writeln!(out, "converged  {}", run.converged)?;
    Ok(if run.converged { 0 } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct SlopeOut {
    direction: DirectionJson,
    eta: DirectionJson,
    t_max: f64,
    nodes: usize,
    rows: Vec<SlopeRow>,
}

pub fn slope_check(a: &SlopeArgs, mode: Mode, out: &mut dyn Write) -> Outcome {
    let (p, _) = load_polytope(&a.target)?;
    check_dim(&p)?;
    let (_, eta) = eta_of(&a.eta, &p)?;
    let mu = parse_direction(&a.mu, &p, &eta)?;
    let defaults = SlopeOptions::for_dim(p.dim());
    if a.t_max.is_nan() || a.t_max <= 0.0 {
        return Err(CliError::Usage("--T must be positive".into()));
    }
    let opts = SlopeOptions {
        t_max: a.t_max,
        nodes: a.grid.unwrap_or(defaults.nodes),
        radius: a.radius,
        translations: !a.no_translations,
    };
    let rows = torus_soliton_solver::slope_check(&p, &mu, &eta, &opts, mode)?;
    let all = rows.iter().all(|r| r.pass);
    let o = SlopeOut {
        direction: DirectionJson::from_direction(&mu),
        eta: DirectionJson::from_direction(&eta),
        t_max: opts.t_max,
        nodes: opts.nodes,
        rows,
    };
    if let Some(dest) = &a.emit_json {
        emit(dest, &pretty(&o), out)?;
    }
    if a.emit_json.as_deref() != Some("-") {
        writeln!(
            out,
            "{:<8} {:>12} {:>12} {:>10} {:>10}  pass",
            "", "slope", "NA", "rel gap", "abs gap"
        )?;
        for r in &o.rows {
            writeln!(
                out,
                "{:<8} {:>12.6} {:>12.6} {:>10.3e} {:>10.3e}  {}",
                r.functional, r.slope, r.na, r.relative_gap, r.absolute_gap, r.pass
            )?;
        }
    }
    Ok(if all { 0 } else { EXIT_FAILED })
}

pub fn catalog(a: &CatalogArgs, out: &mut dyn Write) -> Outcome {
    let fresh = golden::compute_all()?;
    let path = a.golden.clone().unwrap_or_else(|| golden::DEFAULT_PATH.into());
    let shown: Vec<&golden::GoldenEntry> = match &a.name {
        Some(n) => {
            let e = catalog::entry(n)?;
            fresh.iter().filter(|g| g.name == e.name).collect()
        }
        None => fresh.iter().collect(),
    };
    if let Some(dest) = &a.emit_json {
        emit(dest, &pretty(&shown), out)?;
    }
    let quiet = a.emit_json.as_deref() == Some("-");
    if !quiet {
        for g in &shown {
            let e = catalog::entry(&g.name)?;
            let verts: Vec<String> = g.vertices.iter().map(|v| format!("({})", v.join(","))).collect();
            writeln!(out, "{:<6} vertices {}", g.name, verts.join(" "))?;
            writeln!(
                out,
                "       eta [{}] + {}, m_X {} ({:.5}), KE {}, soliton {}",
                g.eta.mu.join(", "),
                g.eta.c,
                g.m_x,
                to_f64(&parse_q(&g.m_x).expect("formatted rational")),
                g.kahler_einstein,
                g.mabuchi_soliton
            )?;
            writeln!(out, "       {}", e.note)?;
        }
    }
    if a.bless {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, golden::render(&fresh))?;
        if !quiet {
            writeln!(out, "golden: wrote {}", path.display())?;
        }
        return Ok(0);
    }
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Failed(format!("golden file {}: {e} (regenerate with --bless)", path.display())))?;
    let stored: Vec<golden::GoldenEntry> = serde_json::from_str(&text)?;
    let bad = golden::mismatches(&stored, &fresh);
    if bad.is_empty() {
        if !quiet {
            writeln!(out, "golden: {} entries match", fresh.len())?;
        }
        Ok(0)
    } else {
        if !quiet {
            writeln!(out, "golden: mismatch for {}", bad.join(", "))?;
        }
        Ok(EXIT_FAILED)
    }
}
