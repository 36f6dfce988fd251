//! Toric test configurations as rational piecewise-linear concave functions on `P`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine::{Affine, AffineJson};
use crate::error::Error;
use crate::invariants::{Direction, Face};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::polytope::Polytope;
use crate::rational::{dot, zeros, RationalVec, Q};

pub const MAX_PIECES: usize = 12;

/// `G(x) = min_j (⟨a_j, x⟩ + b_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLConcave {
    pieces: Vec<Affine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigKind {
    Product,
    /// Deformation to the normal cone of `V(σ)` at crease fraction `ε` of the Seshadri width.
    NormalCone {
        center: Face,
        fraction: Q,
    },
    Custom,
}

#[derive(Debug, Clone)]
pub struct Subdivision {
    /// `(piece index, cell on which it is active)`.
    pub cells: Vec<(usize, Polytope)>,
    /// Vertex set `W` of the subdivision, sorted.
    pub vertices: Vec<RationalVec>,
}

impl PLConcave {
    /// Unreduced constructor; callers who need irredundancy go through [`PLConcave::reduced`].
    pub fn from_pieces(pieces: Vec<Affine>) -> Self {
        assert!(!pieces.is_empty(), "PLConcave needs at least one piece");
        let mut pieces = pieces;
        pieces.sort();
        pieces.dedup();
        Self { pieces }
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_pieces(vec![Affine::zero(n)])
    }

    pub fn product(mu: &Direction) -> Self {
        Self::from_pieces(vec![mu.hamiltonian()])
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.pieces.iter().map(|p| p.eval(x)).min().unwrap()
    }

    pub fn twist(&self, mu: &Direction) -> Self {
        let h = mu.hamiltonian();
        Self::from_pieces(self.pieces.iter().map(|p| p.plus(&h)).collect())
    }

    pub fn shifted(&self, c: &Q) -> Self {
        let n = self.dim();
        self.twist(&Direction::new(zeros(n), c.clone()))
    }

    /// `G = min(0 if include_zero, ⟨a_j, x⟩ + b_j)` with redundant pieces removed against `P`.
    pub fn from_creases(p: &Polytope, data: &[Affine], include_zero: bool) -> Self {
        let mut pieces = data.to_vec();
        if include_zero {
            pieces.push(Affine::zero(p.dim()));
        }
        Self::from_pieces(pieces).reduced(p)
    }

    /// Keep only pieces active on a full-dimensional part of `P`; if pieces dominate each other
    /// down to nothing the pointwise-minimal survivor is returned.
    pub fn reduced(&self, p: &Polytope) -> Self {
        let cells = self.cells(p);
        let keep: Vec<Affine> = cells.into_iter().map(|(i, _)| self.pieces[i].clone()).collect();
        if keep.is_empty() {
            // unreachable for a full-dimensional P, kept as the documented fallback
            return Self::from_pieces(vec![self.pieces[0].clone()]);
        }
        Self::from_pieces(keep)
    }

    fn cells(&self, p: &Polytope) -> Vec<(usize, Polytope)> {
        let base: Vec<(RationalVec, Q)> = p
            .facets()
            .iter()
            .map(|f| (f.normal.clone(), f.offset.clone()))
            .collect();
        if self.pieces.len() == 1 {
            return vec![(0, p.clone())];
        }
        let mut out = Vec::new();
        for (j, pj) in self.pieces.iter().enumerate() {
            let mut cons = base.clone();
            for (k, pk) in self.pieces.iter().enumerate() {
                if k != j {
                    // pj ≤ pk
                    let d = pj.minus(pk);
                    cons.push((d.a, -d.b));
                }
            }
            if let Some(cell) = Polytope::from_halfspaces(p.dim(), &cons) {
                out.push((j, cell));
            }
        }
        out
    }

    pub fn subdivision(&self, p: &Polytope) -> Result<Subdivision, Error> {
        if self.pieces.len() > MAX_PIECES {
            return Err(Error::TooManyPieces(self.pieces.len(), MAX_PIECES));
        }
        let cells = self.cells(p);
        let mut vertices: Vec<RationalVec> = cells.iter().flat_map(|(_, c)| c.vertices().iter().cloned()).collect();
        vertices.sort();
        vertices.dedup();
        Ok(Subdivision { cells, vertices })
    }

    pub fn is_affine_on(&self, p: &Polytope) -> bool {
        self.cells(p).len() == 1
    }

    pub fn to_json(&self, include_zero: bool) -> PLConfigJson {
        PLConfigJson {
            pieces: self.pieces.iter().map(AffineJson::from).collect(),
            include_zero,
        }
    }
}

/// `{"pieces": [{"a": ["0","-1"], "b": "0"}], "include_zero": true}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLConfigJson {
    pub pieces: Vec<AffineJson>,
    #[serde(default)]
    pub include_zero: bool,
}

impl PLConfigJson {
    pub fn build(&self, p: &Polytope) -> Result<PLConcave, Error> {
        let data = self
            .pieces
            .iter()
            .map(Affine::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        if data.iter().any(|a| a.dim() != p.dim()) {
            return Err(Error::Invalid("piece dimension does not match the polytope".into()));
        }
        if data.is_empty() && !self.include_zero {
            return Err(Error::Invalid("configuration has no pieces".into()));
        }
        Ok(PLConcave::from_creases(p, &data, self.include_zero))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NAEnergies {
    pub e_na: Q,
    pub l0_na: Q,
    pub l_na: Q,
    pub e_eta_na: Q,
    pub d_eta_na: Q,
    pub j_na: Q,
    pub j_eta_na: Q,
}

impl NAEnergies {
    pub fn fields(&self) -> [(&'static str, &Q); 7] {
        [
            ("E_na", &self.e_na),
            ("L0_na", &self.l0_na),
            ("L_na", &self.l_na),
            ("E_eta_na", &self.e_eta_na),
            ("D_eta_na", &self.d_eta_na),
            ("J_na", &self.j_na),
            ("J_eta_na", &self.j_eta_na),
        ]
    }
}

/// `∫_P G·Π extra` summed over the active cells.
fn integrate_against(sub: &Subdivision, g: &PLConcave, extra: &[Affine]) -> Result<Q, Error> {
    let mut total = Q::zero();
    for (j, cell) in &sub.cells {
        let mut forms = vec![g.pieces[*j].clone()];
        forms.extend_from_slice(extra);
        total += cell.integrate_product(&forms)?;
    }
    Ok(total)
}

pub fn na_energies(p: &Polytope, g: &PLConcave, eta: &Direction) -> Result<NAEnergies, Error> {
    p.require_reflexive()?;
    let sub = g.subdivision(p)?;
    na_energies_with(p, &p.volume(), &sub, g, eta)
}

pub fn na_energies_with(
    _p: &Polytope,
    vol: &Q,
    sub: &Subdivision,
    g: &PLConcave,
    eta: &Direction,
) -> Result<NAEnergies, Error> {
    let e_na = integrate_against(sub, g, &[])? / vol;
    let e_eta_na = integrate_against(sub, g, &[eta.weight()])? / vol;
    let l0_na = sub.vertices.iter().map(|v| g.eval(v)).max().unwrap();
    let l_na = g.eval(&zeros(g.dim()));
    Ok(NAEnergies {
        d_eta_na: &l_na - &e_eta_na,
        j_na: &l0_na - &e_na,
        j_eta_na: &l0_na - &e_eta_na,
        e_na,
        l0_na,
        l_na,
        e_eta_na,
    })
}

/// `(1/V) ∫_P G^k dx` for `k = 0..=order`.
pub fn dh_pushforward_moments(p: &Polytope, g: &PLConcave, order: usize) -> Result<Vec<Q>, Error> {
    if order > crate::polytope::MAX_DEGREE {
        return Err(Error::DegreeUnsupported(order));
    }
    let sub = g.subdivision(p)?;
    let vol = p.volume();
    (0..=order)
        .map(|k| {
            let mut total = Q::zero();
            for (j, cell) in &sub.cells {
                let forms = vec![g.pieces[*j].clone(); k];
                total += cell.integrate_product(&forms)?;
            }
            Ok(total / &vol)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JtMode {
    /// `inf_μ J^NA(G + h_μ)`.
    #[default]
    Plain,
    /// `inf_μ J_η^NA(G + h_μ)`.
    Eta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JtMin {
    /// Minimizing twist; the constant part normalizes `max_W (G + h_μ*) = 0`.
    pub mu_star: Direction,
    pub value: Q,
    /// Dual weights `λ_v ≥ 0` on subdivision vertices with `Σλ = 1` and `Σλ_v v = w`.
    pub certificate: Vec<(RationalVec, Q)>,
    /// Moment vector of the weight measure of the chosen mode.
    pub weight_moment: RationalVec,
}

/// `(1/V)∫_P x·(weight)`: the barycenter for the plain mode, `∫x(1+h_η)/V` for the η mode.
pub fn weight_moment(p: &Polytope, eta: &Direction, mode: JtMode) -> RationalVec {
    let n = p.dim();
    let v = p.volume();
    (0..n)
        .map(|i| {
            let mut forms = vec![Affine::coordinate(n, i)];
            if mode == JtMode::Eta {
                forms.push(eta.weight());
            }
            p.integrate_product(&forms).unwrap() / &v
        })
        .collect()
}

pub fn jt_min(p: &Polytope, g: &PLConcave, eta: &Direction, mode: JtMode) -> Result<JtMin, Error> {
    p.require_reflexive()?;
    let sub = g.subdivision(p)?;
    let e = na_energies_with(p, &p.volume(), &sub, g, eta)?;
    let w = weight_moment(p, eta, mode);
    jt_min_with(&sub, g, &e, &w, mode)
}

pub fn jt_min_with(sub: &Subdivision, g: &PLConcave, e: &NAEnergies, w: &[Q], mode: JtMode) -> Result<JtMin, Error> {
    let n = g.dim();
    let e_mode = match mode {
        JtMode::Plain => &e.e_na,
        JtMode::Eta => &e.e_eta_na,
    };
    let gv: Vec<Q> = sub.vertices.iter().map(|v| g.eval(v)).collect();

    // primal: variables (μ_1..μ_n, t), minimize t − ⟨μ, w⟩, t − ⟨v, μ⟩ ≥ G(v)
    let mut obj: RationalVec = w.iter().map(|x| -x).collect();
    obj.push(Q::one());
    let mut lp = LinearProgram::new(obj);
    for j in 0..=n {
        lp = lp.with_free(j);
    }
    for (v, gx) in sub.vertices.iter().zip(&gv) {
        let mut row: RationalVec = v.iter().map(|x| -x).collect();
        row.push(Q::one());
        lp.push(row, Relation::Ge, gx.clone());
    }
    let (x, opt) = match lp.solve() {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Unbounded => {
            return Err(Error::Unbounded(format!(
                "weight moment {:?} lies outside the subdivision hull (m_X ≤ 0 or invalid η)",
                w.iter().map(crate::rational::fmt_q).collect::<Vec<_>>()
            )))
        }
        LpOutcome::Infeasible => return Err(Error::Infeasible),
    };
    let mu: RationalVec = x[..n].to_vec();

    // dual: maximize Σ λ_v G(v) with Σλ = 1, Σ λ_v v = w, λ ≥ 0
    let m = sub.vertices.len();
    let mut dual = LinearProgram::new(gv.iter().map(|x| -x).collect());
    dual.push(vec![Q::one(); m], Relation::Eq, Q::one());
    for i in 0..n {
        dual.push(
            sub.vertices.iter().map(|v| v[i].clone()).collect(),
            Relation::Eq,
            w[i].clone(),
        );
    }
    let lambda = match dual.solve() {
        LpOutcome::Optimal { x, value } => {
            debug_assert_eq!(-value, opt, "strong duality");
            x
        }
        _ => return Err(Error::Infeasible),
    };
    let certificate: Vec<(RationalVec, Q)> = sub
        .vertices
        .iter()
        .cloned()
        .zip(lambda)
        .filter(|(_, l)| !l.is_zero())
        .collect();

    let twisted_max = sub
        .vertices
        .iter()
        .zip(&gv)
        .map(|(v, gx)| gx + dot(v, &mu))
        .max()
        .unwrap();
    Ok(JtMin {
        mu_star: Direction::new(mu, -twisted_max),
        value: opt - e_mode,
        certificate,
        weight_moment: w.to_vec(),
    })
}

/// Exact check that `0` lies in the convex hull of active constraint gradients at `μ*`.
pub fn verify_certificate(sub: &Subdivision, g: &PLConcave, jt: &JtMin) -> bool {
    let n = g.dim();
    let mut total = Q::zero();
    let mut moment = zeros(n);
    let vals: Vec<Q> = sub
        .vertices
        .iter()
        .map(|v| g.eval(v) + dot(v, &jt.mu_star.mu))
        .collect();
    let top = vals.iter().max().unwrap().clone();
    for (v, l) in &jt.certificate {
        if l.is_negative() {
            return false;
        }
        let Some(i) = sub.vertices.iter().position(|x| x == v) else {
            return false;
        };
        if vals[i] != top {
            return false;
        }
        total += l;
        for (m, x) in moment.iter_mut().zip(v) {
            *m += l * x;
        }
    }
    total.is_one() && moment == jt.weight_moment
}

/// Lattice distance sum `ℓ_σ = Σ_{ρ∈σ} d_ρ` of a face.
pub fn face_distance(p: &Polytope, face: &Face) -> Affine {
    face.facets
        .iter()
        .map(|&i| p.facets()[i].distance())
        .reduce(|a, b| a.plus(&b))
        .unwrap()
}

/// `G = min(0, ℓ_σ − ε·max_P ℓ_σ)`.
pub fn normal_cone(p: &Polytope, face: &Face, fraction: &Q) -> PLConcave {
    let l = face_distance(p, face);
    let (w, _) = p.max_affine(&l);
    let crease = l.minus(&Affine::constant(p.dim(), fraction * w));
    PLConcave::from_creases(p, &[crease], true)
}

pub fn is_trivial(g: &PLConcave) -> bool {
    g.pieces.len() == 1 && g.pieces[0].is_constant() && g.pieces[0].b.is_zero()
}

pub fn sign_of(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
