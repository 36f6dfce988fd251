//! The weighted inverse Monge–Ampère flow `d psi/dt = g(grad psi) - e^rho`.
//!
//! Each step solves `(I/dt - L) delta = g - e^rho`, where `L delta = <mu, grad delta> +
//! e^rho tr(H^{-1} D^2 delta)` is the principal part of the linearization; the zeroth-order
//! terms stay explicit. On a 2-D grid the rows of boundary nodes carry the boundary condition of
//! [`Stencil`] instead. A step is accepted when the Hessian stays positive definite and `D_eta`
//! does not increase beyond a rounding slack (optionally also `R`); otherwise `dt` is halved.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};
use torus_soliton_core::exec::Mode;

use crate::error::SolverError;
use crate::functionals::{Diagnostics, Evaluator, Weight};
use crate::grid::Grid;
use crate::potential::{ConvexPotential, Stencil};
use crate::ricci::{ricci_potential, Ricci};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub dt: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub steps: usize,
    pub tol: f64,
    /// Slack allowed for increases of `D_eta` and `R` in one step.
    pub slack: f64,
    /// Also reject steps that increase `R`.
    pub monotone_r: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt: 0.5,
            dt_min: 1e-6,
            dt_max: 100.0,
            steps: 200,
            tol: 5e-3,
            slack: 1e-9,
            monotone_r: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRun {
    /// The last accepted iterate, which has the smallest `D_eta` seen.
    pub potential: ConvexPotential,
    pub trace: Vec<TraceRow>,
    pub residual: f64,
    pub converged: bool,
    pub rejected: usize,
}

/// Assemble `I/dt - L` on the grid.
pub fn step_matrix(
    grid: &Grid,
    st: &Stencil,
    ricci: &Ricci,
    weight: &Weight,
    dt: f64,
) -> Result<SparseColMat<usize, f64>, SolverError> {
    let n = grid.len();
    let mut t = Vec::with_capacity(n * if grid.dim == 1 { 3 } else { 9 });
    let hx = grid.h[0];
    for k in 0..n {
        let h = &ricci.jets[k].hess;
        let er = ricci.rho[k].exp();
        t.push(Triplet::new(k, k, 1.0 / dt));
        if grid.dim == 1 {
            let a = er / h[0] / (hx * hx);
            let b = weight.mu[0] / (2.0 * hx);
            t.push(Triplet::new(k, k, 2.0 * a));
            let i = k as isize;
            t.push(Triplet::new(k, grid.reflect(i + 1), -(a + b)));
            t.push(Triplet::new(k, grid.reflect(i - 1), -(a - b)));
            continue;
        }
        let hy = grid.h[1];
        let d = ricci.det[k];
        // e^rho H^{-1}
        let (axx, axy, ayy) = (er * h[2] / d, -er * h[1] / d, er * h[0] / d);
        if let Some(tie) = st.tie(k) {
            t.pop();
            t.push(Triplet::new(k, k, 1.0));
            t.extend(tie.iter().map(|&(m, x)| Triplet::new(k, m, -x)));
            continue;
        }
        let cx = axx / (hx * hx);
        let cy = ayy / (hy * hy);
        let cxy = 2.0 * axy / (4.0 * hx * hy);
        let bx = weight.mu[0] / (2.0 * hx);
        let by = weight.mu[1] / (2.0 * hy);
        let [i, j] = grid.split(k);
        let at = |di: isize, dj: isize| grid.index([(i as isize + di) as usize, (j as isize + dj) as usize]);
        t.push(Triplet::new(k, k, 2.0 * (cx + cy)));
        for (d, c) in [
            ((1, 0), -(cx + bx)),
            ((-1, 0), -(cx - bx)),
            ((0, 1), -(cy + by)),
            ((0, -1), -(cy - by)),
            ((1, 1), -cxy),
            ((-1, -1), -cxy),
            ((1, -1), cxy),
            ((-1, 1), cxy),
        ] {
            t.push(Triplet::new(k, at(d.0, d.1), c));
        }
    }
    SparseColMat::try_new_from_triplets(n, n, &t).map_err(|e| SolverError::Invalid(format!("matrix assembly: {e:?}")))
}

/// One linear solve; returns the increment to `u`.
pub fn step_increment(psi: &ConvexPotential, ricci: &Ricci, weight: &Weight, dt: f64) -> Result<Vec<f64>, SolverError> {
    let st = psi.stencil();
    let a = step_matrix(&psi.grid, &st, ricci, weight, dt)?;
    let lu = a
        .sp_lu()
        .map_err(|e| SolverError::Invalid(format!("sparse LU: {e:?}")))?;
    let n = psi.grid.len();
    let mut b = Mat::<f64>::zeros(n, 1);
    for k in 0..n {
        b[(k, 0)] = match st.tie(k) {
            Some(tie) => tie.iter().map(|&(m, x)| x * psi.u[m]).sum::<f64>() - psi.u[k],
            None => weight.eval(ricci.jets[k].grad) - ricci.rho[k].exp(),
        };
    }
    lu.solve_in_place(b.as_mut());
    let out: Vec<f64> = (0..n).map(|k| b[(k, 0)]).collect();
    if out.iter().any(|x| !x.is_finite()) {
        return Err(SolverError::QuadratureFailure("linear step"));
    }
    Ok(out)
}

/// `min g` over the exponents of the reference, i.e. over the vertices of its gradient image.
pub fn weight_floor(psi: &ConvexPotential, weight: &Weight) -> f64 {
    psi.reference
        .terms
        .iter()
        .map(|(_, m)| weight.eval(*m))
        .fold(f64::INFINITY, f64::min)
}

pub fn flow_run(
    start: &ConvexPotential,
    weight: Weight,
    opts: &FlowOptions,
    mode: Mode,
) -> Result<FlowRun, SolverError> {
    if weight_floor(start, &weight) <= 0.0 {
        return Err(SolverError::Invalid("1 + h_eta is not positive on P (m_X <= 0)".into()));
    }
    let ev = Evaluator::new(start, weight, mode);
    let mut psi = start.clone();
    let mut ricci = ricci_potential(&psi, mode)?;
    let mut diag = ev.evaluate_with(&psi, &ricci)?;
    let mut trace = vec![TraceRow {
        step: 0,
        t: 0.0,
        dt: 0.0,
        diagnostics: diag,
    }];
    let (mut t, mut dt, mut rejected) = (0.0, opts.dt, 0usize);

    let finish = |potential: ConvexPotential, trace: Vec<TraceRow>, residual, converged, rejected| FlowRun {
        potential,
        trace,
        residual,
        converged,
        rejected,
    };

    for step in 1..=opts.steps {
        if diag.residual < opts.tol {
            return Ok(finish(psi, trace, diag.residual, true, rejected));
        }
        loop {
            if dt < opts.dt_min {
                let run = finish(psi, trace, diag.residual, false, rejected);
                return Err(SolverError::NotConverged(Box::new(run)));
            }
            let trial = step_increment(&psi, &ricci, &weight, dt).and_then(|delta| {
                let u: Vec<f64> = psi.u.iter().zip(&delta).map(|(a, b)| a + b).collect();
                let next = psi.with_u(u);
                let r = ricci_potential(&next, mode)?;
                let d = ev.evaluate_with(&next, &r)?;
                Ok((next, r, d))
            });
            match trial {
                Ok((next, r, d)) if accept(&diag, &d, opts) => {
                    t += dt;
                    psi = next;
                    ricci = r;
                    diag = d;
                    trace.push(TraceRow {
                        step,
                        t,
                        dt,
                        diagnostics: diag,
                    });
                    dt = (2.0 * dt).min(opts.dt_max);
                    break;
                }
                Ok(_) | Err(SolverError::DegenerateHessian { .. }) | Err(SolverError::QuadratureFailure(_)) => {
                    rejected += 1;
                    dt /= 2.0;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if diag.residual < opts.tol {
        return Ok(finish(psi, trace, diag.residual, true, rejected));
    }
    let run = finish(psi, trace, diag.residual, false, rejected);
    Err(SolverError::NotConverged(Box::new(run)))
}

fn accept(old: &Diagnostics, new: &Diagnostics, opts: &FlowOptions) -> bool {
    if new.d_eta > old.d_eta + opts.slack {
        return false;
    }
    !(opts.monotone_r && new.r > old.r + opts.slack)
}
