//! Damped Newton for `e^{K - psi} = g(psi') psi''` on 1-D grids, a cross-check of the flow.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};
use torus_soliton_core::exec::Mode;

use crate::error::SolverError;
use crate::functionals::{Evaluator, Weight};
use crate::potential::ConvexPotential;
use crate::ricci::ricci_potential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonRun {
    pub potential: ConvexPotential,
    pub iterations: usize,
    /// Sup norm of `psi + log psi'' + log g - K` per iteration.
    pub history: Vec<f64>,
    /// Soliton residual `sup |e^rho - g|` of the result.
    pub residual: f64,
    pub converged: bool,
}

fn equation(psi: &ConvexPotential, weight: &Weight, k0: f64, mode: Mode) -> Option<(Vec<f64>, Vec<[f64; 3]>)> {
    let jets = psi.jets(mode);
    let mut r = Vec::with_capacity(jets.len());
    let mut coef = Vec::with_capacity(jets.len());
    for j in &jets {
        let g = weight.eval(j.grad);
        if j.hess[0] <= 0.0 || g <= 0.0 {
            return None;
        }
        r.push(j.val + j.hess[0].ln() + g.ln() - k0);
        coef.push([1.0 / j.hess[0], weight.mu[0] / g, 1.0]);
    }
    Some((r, coef))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn solve(
    start: &ConvexPotential,
    weight: Weight,
    opts: &NewtonOptions,
    mode: Mode,
) -> Result<NewtonRun, SolverError> {
    if start.dim() != 1 {
        return Err(SolverError::Unsupported(
            "the Newton solver handles 1-D grids only".into(),
        ));
    }
    let g = &start.grid;
    let n = g.len();
    let hx = g.h[0];
    let k0 = ricci_potential(start, mode)?.c;
    let mut psi = start.clone();
    let (mut r, mut coef) =
        equation(&psi, &weight, k0, mode).ok_or(SolverError::DegenerateHessian { node: 0, det: 0.0 })?;
    let mut history = vec![sup(&r)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if history[history.len() - 1] < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut t = Vec::with_capacity(3 * n);
        for k in 0..n {
            let i = k as isize;
            let a = coef[k][0] / (hx * hx);
            let b = coef[k][1] / (2.0 * hx);
            t.push(Triplet::new(k, k, coef[k][2] - 2.0 * a));
            t.push(Triplet::new(k, g.reflect(i + 1), a + b));
            t.push(Triplet::new(k, g.reflect(i - 1), a - b));
        }
        let jac = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
            .map_err(|e| SolverError::Invalid(format!("matrix assembly: {e:?}")))?;
        let lu = jac
            .sp_lu()
            .map_err(|e| SolverError::Invalid(format!("sparse LU: {e:?}")))?;
        let mut b = Mat::<f64>::zeros(n, 1);
        for k in 0..n {
            b[(k, 0)] = -r[k];
        }
        lu.solve_in_place(b.as_mut());
        let now = history[history.len() - 1];
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-6 {
            let u: Vec<f64> = (0..n).map(|k| psi.u[k] + step * b[(k, 0)]).collect();
            let trial = psi.with_u(u);
            if let Some((r2, c2)) = equation(&trial, &weight, k0, mode) {
                let s = sup(&r2);
                if s.is_finite() && s < now {
                    psi = trial;
                    r = r2;
                    coef = c2;
                    history.push(s);
                    moved = true;
                    break;
                }
            }
            step /= 2.0;
        }
        if !moved {
            break;
        }
    }
    if history[history.len() - 1] < opts.tol {
        converged = true;
    }
    let residual = Evaluator::new(&psi, weight, mode).evaluate(&psi)?.residual;
    Ok(NewtonRun {
        potential: psi,
        iterations,
        history,
        residual,
        converged,
    })
}
