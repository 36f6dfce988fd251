//! Ricci potential `rho = c - psi - log det D^2 psi`.

use torus_soliton_core::exec::Mode;

use crate::ansatz::Jet;
use crate::error::SolverError;
use crate::potential::{det, positive_definite, ConvexPotential};

#[derive(Debug, Clone)]
pub struct Ricci {
    pub rho: Vec<f64>,
    pub det: Vec<f64>,
    pub jets: Vec<Jet>,
    /// The normalizing constant `c`.
    pub c: f64,
}

impl Ricci {
    /// `sum w (e^rho - 1) det`, zero up to rounding.
    pub fn normalization_defect(&self, w: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.rho.len() {
            s += w[k] * (self.rho[k].exp() - 1.0) * self.det[k];
        }
        s
    }
}

/// `log sum_k w_k exp(x_k)`.
pub(crate) fn log_sum_exp(w: &[f64], x: impl Fn(usize) -> f64) -> f64 {
    let top = (0..w.len()).map(&x).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = (0..w.len()).map(|k| w[k] * (x(k) - top).exp()).sum();
    top + s.ln()
}

pub fn ricci_potential(psi: &ConvexPotential, mode: Mode) -> Result<Ricci, SolverError> {
    let jets = psi.jets(mode);
    ricci_from_jets(psi, jets)
}

pub(crate) fn ricci_from_jets(psi: &ConvexPotential, jets: Vec<Jet>) -> Result<Ricci, SolverError> {
    let dim = psi.dim();
    let w = psi.grid.weights();
    let mut dets = Vec::with_capacity(jets.len());
    for (k, j) in jets.iter().enumerate() {
        let d = det(dim, &j.hess);
        if !positive_definite(dim, &j.hess) || !d.is_finite() {
            return Err(SolverError::DegenerateHessian { node: k, det: d });
        }
        dets.push(d);
    }
    let log_mass = log_sum_exp(&w, |k| dets[k].ln());
    let log_z = log_sum_exp(&w, |k| -jets[k].val);
    let c = log_mass - log_z;
    let rho = jets.iter().zip(&dets).map(|(j, d)| c - j.val - d.ln()).collect();
    Ok(Ricci {
        rho,
        det: dets,
        jets,
        c,
    })
}
