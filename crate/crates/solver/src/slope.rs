//! Archimedean slopes along product rays against the exact non-Archimedean values.

use serde::{Deserialize, Serialize};
use torus_soliton_core::exec::Mode;
use torus_soliton_core::rational::to_f64;
use torus_soliton_core::test_config::{na_energies, PLConcave};
use torus_soliton_core::{Direction, Polytope};

use crate::ansatz::Ansatz;
use crate::error::SolverError;
use crate::functionals::{Diagnostics, Evaluator, Weight};
use crate::grid::Grid;
use crate::potential::ConvexPotential;

pub const REL_TOL: f64 = 0.02;
pub const ABS_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub functional: String,
    pub slope: f64,
    pub na: f64,
    /// `|slope - na| / |na|`, infinite when `na = 0`.
    pub relative_gap: f64,
    pub absolute_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeOptions {
    pub t_max: f64,
    /// Nodes per axis.
    pub nodes: usize,
    /// Half-width of the base box.
    pub radius: f64,
    pub translations: bool,
}

impl SlopeOptions {
    pub fn for_dim(dim: usize) -> Self {
        Self {
            t_max: 40.0,
            nodes: if dim == 1 { 257 } else { 193 },
            radius: 8.0,
            translations: true,
        }
    }
}

/// `psi^t(y) = psi_0(y + t mu) + t c` on a grid covering `B` and `B - T mu`.
pub fn ray_potentials(p: &Polytope, mu: &Direction, opts: &SlopeOptions) -> (ConvexPotential, ConvexPotential) {
    let dim = p.dim();
    let m: Vec<f64> = mu.mu.iter().map(to_f64).collect();
    let c = to_f64(&mu.c);
    let (mut lo, mut hi) = (vec![0.0; dim], vec![0.0; dim]);
    for a in 0..dim {
        lo[a] = (-opts.radius).min(-opts.radius - opts.t_max * m[a]);
        hi[a] = opts.radius.max(opts.radius - opts.t_max * m[a]);
    }
    let grid = Grid::boxed(&lo, &hi, opts.nodes);
    let base = ConvexPotential::reference(grid, Ansatz::lattice(p));
    let at = |t: f64| {
        let mut shift = [0.0; 2];
        for a in 0..dim {
            shift[a] = -t * m[a];
        }
        ConvexPotential {
            shift,
            u: vec![t * c; base.u.len()],
            ..base.clone()
        }
    };
    (at(opts.t_max / 2.0), at(opts.t_max))
}

fn pick(d: &Diagnostics, name: &str) -> f64 {
    match name {
        "E" => d.e,
        "E_eta" => d.e_eta,
        "L0" => d.l0,
        "J" => d.j,
        "J_eta" => d.j_eta,
        "D_eta" => d.d_eta,
        "J_T" => d.j_t,
        _ => unreachable!(),
    }
}

pub const FUNCTIONALS: [&str; 7] = ["E", "E_eta", "L0", "J", "J_eta", "D_eta", "J_T"];

pub fn slope_check(
    p: &Polytope,
    mu: &Direction,
    eta: &Direction,
    opts: &SlopeOptions,
    mode: Mode,
) -> Result<Vec<SlopeRow>, SolverError> {
    if !(1..=2).contains(&p.dim()) {
        return Err(SolverError::Unsupported(format!(
            "slope checks need dimension 1 or 2, got {}",
            p.dim()
        )));
    }
    let na = na_energies(p, &PLConcave::product(mu), eta)?;
    let (half, full) = ray_potentials(p, mu, opts);
    let ev = Evaluator::new(&full, Weight::from_direction(eta), mode);
    let mut dh = ev.evaluate(&half)?;
    let mut df = ev.evaluate(&full)?;
    if opts.translations {
        dh.j_t = ev.j_t(&half)?.0;
        df.j_t = ev.j_t(&full)?.0;
    }
    let exact = |name: &str| -> f64 {
        match name {
            "E" => to_f64(&na.e_na),
            "E_eta" => to_f64(&na.e_eta_na),
            "L0" => to_f64(&na.l0_na),
            "J" => to_f64(&na.j_na),
            "J_eta" => to_f64(&na.j_eta_na),
            "D_eta" => to_f64(&na.d_eta_na),
            // A product configuration is its own twist.
            "J_T" => 0.0,
            _ => unreachable!(),
        }
    };
    let mut rows = Vec::new();
    for name in FUNCTIONALS {
        if name == "J_T" && !opts.translations {
            continue;
        }
        let slope = (pick(&df, name) - pick(&dh, name)) / (opts.t_max / 2.0);
        let na = exact(name);
        let absolute_gap = (slope - na).abs();
        let relative_gap = if na == 0.0 {
            f64::INFINITY
        } else {
            absolute_gap / na.abs()
        };
        rows.push(SlopeRow {
            functional: name.to_string(),
            slope,
            na,
            relative_gap,
            absolute_gap,
            pass: relative_gap <= REL_TOL || absolute_gap <= ABS_TOL,
        });
    }
    Ok(rows)
}
