//! Energies of a discrete potential relative to its reference.
//!
//! Spatial integrals use trapezoid weights; `E` and `E_eta` integrate the path derivative along
//! `psi_0 + s (psi - psi_0)` with 10-point Gauss–Legendre in `s`. Measures are normalized by the
//! discrete mass of the reference, `V_ref = sum w det D^2 psi_0`.

use serde::{Deserialize, Serialize};
use torus_soliton_core::exec::{self, Mode};
use torus_soliton_core::invariants::{futaki, pairing};
use torus_soliton_core::rational::to_f64;
use torus_soliton_core::{Direction, Polytope};

use crate::ansatz::Jet;
use crate::error::SolverError;
use crate::potential::{chunk_len, det, ConvexPotential};
use crate::ricci::{log_sum_exp, ricci_from_jets, Ricci};

/// Gauss–Legendre nodes and weights on [-1, 1], positive half.
const GL10: [(f64, f64); 5] = [
    (0.148_874_338_981_631_2, 0.295_524_224_714_752_9),
    (0.433_395_394_129_247_2, 0.269_266_719_309_996_3),
    (0.679_409_568_299_024_4, 0.219_086_362_515_982),
    (0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
    (0.973_906_528_517_171_7, 0.066_671_344_308_688_1),
];

/// Nodes and weights on [0, 1].
pub fn gauss_legendre_unit() -> [(f64, f64); 10] {
    let mut out = [(0.0, 0.0); 10];
    for (i, &(x, w)) in GL10.iter().enumerate() {
        out[4 - i] = ((1.0 - x) / 2.0, w / 2.0);
        out[5 + i] = ((1.0 + x) / 2.0, w / 2.0);
    }
    out
}

/// `g = 1 + <mu, x> + c` in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Weight {
    pub mu: [f64; 2],
    pub c: f64,
}

impl Weight {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn from_direction(d: &Direction) -> Self {
        let mut mu = [0.0; 2];
        for (i, m) in d.mu.iter().enumerate().take(2) {
            mu[i] = to_f64(m);
        }
        Self { mu, c: to_f64(&d.c) }
    }

    #[inline]
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        1.0 + self.mu[0] * x[0] + self.mu[1] * x[1] + self.c
    }

    pub fn is_trivial(&self) -> bool {
        self.mu == [0.0; 2] && self.c == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub e: f64,
    pub e_eta: f64,
    pub l: f64,
    pub l0: f64,
    pub d: f64,
    pub d_eta: f64,
    pub j: f64,
    pub j_eta: f64,
    /// `NaN` unless translations were minimized.
    pub j_t: f64,
    pub i_ref: f64,
    pub r: f64,
    pub h_entropy: f64,
    pub m_eta: f64,
    /// `sup |e^rho - 1 - h_eta(grad psi)|` over the nodes that carry the equation.
    pub residual: f64,
    /// `sum w det D^2 psi`.
    pub mass: f64,
}

/// Cached reference data for repeated evaluations on one grid.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub weight: Weight,
    pub mode: Mode,
    w: Vec<f64>,
    ref_jets: Vec<Jet>,
    ref_det: Vec<f64>,
    v_ref: f64,
    log_z0: f64,
}

/// The pieces of [`Diagnostics`] that depend on a potential but not on translations.
#[derive(Debug, Clone, Copy)]
struct Energies {
    e: f64,
    e_eta: f64,
    l0: f64,
}

impl Evaluator {
    pub fn new(psi: &ConvexPotential, weight: Weight, mode: Mode) -> Self {
        let reference = ConvexPotential::reference(psi.grid.clone(), psi.reference.clone());
        let ref_jets = reference.jets(mode);
        let dim = psi.dim();
        let ref_det: Vec<f64> = ref_jets.iter().map(|j| det(dim, &j.hess)).collect();
        let w = psi.grid.weights();
        let v_ref = (0..w.len()).map(|k| w[k] * ref_det[k]).sum();
        let log_z0 = log_sum_exp(&w, |k| -ref_jets[k].val);
        Self {
            weight,
            mode,
            w,
            ref_jets,
            ref_det,
            v_ref,
            log_z0,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn reference_mass(&self) -> f64 {
        self.v_ref
    }

    fn energies(&self, psi: &ConvexPotential, jets: &[Jet]) -> Result<Energies, SolverError> {
        let dim = psi.dim();
        let gl = gauss_legendre_unit();
        let g = &psi.grid;
        let wt = self.weight;
        let sums = exec::map_chunks(self.mode, g.len(), chunk_len(g), |r| {
            let (mut e, mut ee, mut l0) = (0.0, 0.0, f64::NEG_INFINITY);
            for k in r {
                let a = &self.ref_jets[k];
                let b = &jets[k];
                let phi = b.val - a.val;
                l0 = l0.max(phi);
                let dh = [b.hess[0] - a.hess[0], b.hess[1] - a.hess[1], b.hess[2] - a.hess[2]];
                let dg = [b.grad[0] - a.grad[0], b.grad[1] - a.grad[1]];
                let (mut se, mut see) = (0.0, 0.0);
                for &(s, ws) in &gl {
                    let h = [a.hess[0] + s * dh[0], a.hess[1] + s * dh[1], a.hess[2] + s * dh[2]];
                    let m = det(dim, &h);
                    se += ws * m;
                    see += ws * m * wt.eval([a.grad[0] + s * dg[0], a.grad[1] + s * dg[1]]);
                }
                e += self.w[k] * phi * se;
                ee += self.w[k] * phi * see;
            }
            (e, ee, l0)
        });
        let mut out = Energies {
            e: 0.0,
            e_eta: 0.0,
            l0: f64::NEG_INFINITY,
        };
        for (e, ee, l0) in sums {
            out.e += e;
            out.e_eta += ee;
            out.l0 = out.l0.max(l0);
        }
        out.e /= self.v_ref;
        out.e_eta /= self.v_ref;
        if !(out.e.is_finite() && out.e_eta.is_finite() && out.l0.is_finite()) {
            return Err(SolverError::QuadratureFailure("energy path integral"));
        }
        Ok(out)
    }

    /// `J` of `psi`, without the Ricci potential.
    pub fn j(&self, psi: &ConvexPotential) -> Result<f64, SolverError> {
        let jets = psi.jets(self.mode);
        let en = self.energies(psi, &jets)?;
        Ok(en.l0 - en.e)
    }

    pub fn evaluate(&self, psi: &ConvexPotential) -> Result<Diagnostics, SolverError> {
        let ricci = ricci_from_jets(psi, psi.jets(self.mode))?;
        self.evaluate_with(psi, &ricci)
    }

    pub fn evaluate_with(&self, psi: &ConvexPotential, ricci: &Ricci) -> Result<Diagnostics, SolverError> {
        let jets = &ricci.jets;
        let en = self.energies(psi, jets)?;
        let w = &self.w;
        let n = w.len();
        let log_z = log_sum_exp(w, |k| -jets[k].val);
        let l = -(log_z - self.log_z0);
        let mass: f64 = (0..n).map(|k| w[k] * ricci.det[k]).sum();

        let (mut r, mut residual) = (0.0, 0.0f64);
        let (mut i0, mut i1) = (0.0, 0.0);
        let mut gmass = 0.0;
        for k in 0..n {
            let er = ricci.rho[k].exp();
            let g = self.weight.eval(jets[k].grad);
            r += w[k] * (er - 1.0).powi(2) * ricci.det[k];
            // 2-D boundary nodes carry the boundary condition, not the equation
            if !(psi.grid.dim == 2 && psi.grid.on_boundary(k)) {
                residual = residual.max((er - g).abs());
            }
            let phi = jets[k].val - self.ref_jets[k].val;
            i0 += w[k] * phi * self.ref_det[k];
            i1 += w[k] * phi * ricci.det[k];
            gmass += w[k] * g * ricci.det[k];
        }
        // nu = g MA(psi), mu_0 = e^{-psi_0}, both normalized.
        let (mut h, mut nphi) = (0.0, 0.0);
        for k in 0..n {
            let g = self.weight.eval(jets[k].grad);
            let nu = g * ricci.det[k] / gmass;
            if nu > 0.0 {
                let log_mu0 = -self.ref_jets[k].val - self.log_z0;
                h += w[k] * nu * (nu.ln() - log_mu0);
            }
            nphi += w[k] * nu * (jets[k].val - self.ref_jets[k].val);
        }
        let out = Diagnostics {
            e: en.e,
            e_eta: en.e_eta,
            l,
            l0: en.l0,
            d: l - en.e,
            d_eta: l - en.e_eta,
            j: en.l0 - en.e,
            j_eta: en.l0 - en.e_eta,
            j_t: f64::NAN,
            i_ref: i0 / self.v_ref - i1 / mass,
            r: r / mass,
            h_entropy: h,
            m_eta: h + nphi - en.e_eta,
            residual,
            mass,
        };
        let finite = [out.l, out.r, out.h_entropy, out.m_eta, out.residual]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(SolverError::QuadratureFailure("entropy or Ricci term"));
        }
        Ok(out)
    }

    /// `min_a J(psi(. - a))` by cyclic golden-section searches, starting from the translation that
    /// undoes the smooth shift. Returns the minimum and its minimizer.
    pub fn j_t(&self, psi: &ConvexPotential) -> Result<(f64, [f64; 2]), SolverError> {
        let dim = psi.dim();
        let mut a = [-psi.shift[0], -psi.shift[1]];
        let mut best = self.j(&psi.translated(a))?;
        let mut err = None;
        for _sweep in 0..3 {
            let before = best;
            for axis in 0..dim {
                let half = 0.5 * (psi.grid.hi(axis) - psi.grid.lo[axis]);
                let f = |t: f64| {
                    let mut b = a;
                    b[axis] = t;
                    match self.j(&psi.translated(b)) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::INFINITY
                        }
                    }
                };
                let (t, v) = golden_section(f, a[axis] - half, a[axis] + half, 1e-7 * half);
                if v < best {
                    best = v;
                    a[axis] = t;
                }
            }
            if (before - best).abs() <= 1e-12 {
                break;
            }
        }
        if let Some(e) = err {
            if !best.is_finite() {
                return Err(e);
            }
        }
        Ok((best, a))
    }
}

/// Minimize a unimodal function on [lo, hi]; the endpoints are also sampled.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    for t in [lo, hi] {
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// All diagnostics of `psi`; `translations` also minimizes `J` over the torus orbit.
pub fn functionals(
    psi: &ConvexPotential,
    weight: Weight,
    translations: bool,
    mode: Mode,
) -> Result<Diagnostics, SolverError> {
    let ev = Evaluator::new(psi, weight, mode);
    let mut d = ev.evaluate(psi)?;
    if translations {
        d.j_t = ev.j_t(psi)?.0;
    }
    Ok(d)
}

/// `F(eta) / |eta|`, the lower bound for `sqrt(R)`; zero when `eta = 0`.
pub fn calabi_bound(p: &Polytope, eta: &Direction) -> Result<f64, SolverError> {
    if eta.is_zero() {
        return Ok(0.0);
    }
    let f = to_f64(&futaki(p, eta)?);
    Ok(f / to_f64(&pairing(p, eta, eta)).sqrt())
}
