//! Verdicts for relative D-stability over a family, the finite-k weight oracle and the
//! destabilizer search.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::affine::Affine;
use crate::error::Error;
use crate::exec::{self, Mode};
use crate::invariants::{self, Direction, EtaChoice, Face, Invariants};
use crate::polytope::Polytope;
use crate::rational::{fmt_q, qf, qi, Q};
use crate::test_config::{
    jt_min_with, na_energies_with, normal_cone, weight_moment, ConfigKind, JtMin, JtMode, NAEnergies, PLConcave,
    Subdivision,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSample {
    pub k: i64,
    pub n_k: usize,
    /// `Σλ_i / (k N_k)`.
    pub mean: Q,
    /// `max λ_i / k`.
    pub max: Q,
    /// `Σ λ_i μ_i / (k² N_k)`.
    pub pairing: Q,
    /// `min μ_i / k`.
    pub min_mu: Q,
}

struct IntAffine {
    a: Vec<i128>,
    b: i128,
    den: i128,
}

fn int_affine(f: &Affine) -> IntAffine {
    let den =
        f.a.iter()
            .chain(std::iter::once(&f.b))
            .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let dq = Q::from_integer(den.clone());
    let conv = |x: &Q| (x * &dq).to_integer().to_i128().expect("coefficient overflow");
    IntAffine {
        a: f.a.iter().map(conv).collect(),
        b: conv(&f.b),
        den: den.to_i128().expect("denominator overflow"),
    }
}

/// Numerator of `k·f(χ/k)` over `den`.
fn int_eval(f: &IntAffine, chi: &[i64], k: i64) -> i128 {
    f.a.iter().zip(chi).map(|(a, &c)| a * c as i128).sum::<i128>() + f.b * k as i128
}

/// Enumerate `χ ∈ kP ∩ M`, weights `λ(χ) = ⌊k·G(χ/k)⌋` and `μ(χ) = ⟨μ, χ⟩ + k·c`.
pub fn weight_oracle(p: &Polytope, g: &PLConcave, mu: &Direction, k: i64, mode: Mode) -> WeightSample {
    assert!(k >= 1, "k must be positive");
    let pts = p.lattice_points_dilated(k);
    let pieces: Vec<IntAffine> = g.pieces().iter().map(int_affine).collect();
    let m = int_affine(&mu.hamiltonian());
    let parts = exec::map_chunks(mode, pts.len(), 4096, |r| {
        let mut sum = 0i128;
        let mut max = i128::MIN;
        let mut pair = 0i128;
        let mut min_mu = i128::MAX;
        for chi in &pts[r] {
            let lam = pieces
                .iter()
                .map(|f| Integer::div_floor(&int_eval(f, chi, k), &f.den))
                .min()
                .unwrap();
            let w = int_eval(&m, chi, k);
            sum += lam;
            max = max.max(lam);
            pair += lam * w;
            min_mu = min_mu.min(w);
        }
        (sum, max, pair, min_mu)
    });
    let (sum, max, pair, min_mu) = parts.into_iter().fold((0i128, i128::MIN, 0i128, i128::MAX), |acc, x| {
        (acc.0 + x.0, acc.1.max(x.1), acc.2 + x.2, acc.3.min(x.3))
    });
    let n = pts.len();
    let big = |x: i128| Q::from_integer(BigInt::from(x));
    let kq = qi(k);
    let nq = qi(n as i64);
    WeightSample {
        k,
        n_k: n,
        mean: big(sum) / (&kq * &nq),
        max: big(max) / &kq,
        pairing: big(pair) / (&kq * &kq * &nq * big(m.den)),
        min_mu: big(min_mu) / (&kq * big(m.den)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub label: String,
    pub kind: ConfigKind,
    pub config: PLConcave,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    /// Products `±e_i`, normal cones of every proper face at fractions 1/4, 1/2, 3/4 and the
    /// full-width cones of faces invariant under `Aut(X, η)`.
    Standard,
    Products,
    NormalCones,
    Custom(Vec<FamilyMember>),
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Standard => "standard",
            FamilySpec::Products => "products",
            FamilySpec::NormalCones => "normal-cones",
            FamilySpec::Custom(_) => "custom",
        }
    }
}

pub const CONE_FRACTIONS: [(i64, i64); 3] = [(1, 4), (1, 2), (3, 4)];

pub fn face_label(face: &Face) -> String {
    let ids: Vec<String> = face.facets.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

pub fn cone_member(p: &Polytope, face: &Face, fraction: &Q) -> FamilyMember {
    FamilyMember {
        label: format!("normal_cone{}@{}", face_label(face), fmt_q(fraction)),
        kind: ConfigKind::NormalCone {
            center: face.clone(),
            fraction: fraction.clone(),
        },
        config: normal_cone(p, face, fraction),
    }
}

pub fn product_members(n: usize) -> Vec<FamilyMember> {
    let mut out = Vec::new();
    for i in 0..n {
        for s in [1, -1] {
            let mut d = Direction::basis(n, i);
            d.mu[i] = qi(s);
            out.push(FamilyMember {
                label: format!("product({}e{})", if s > 0 { '+' } else { '-' }, i + 1),
                kind: ConfigKind::Product,
                config: PLConcave::product(&d),
            });
        }
    }
    out
}

/// Faces whose orbit closure is preserved by `Aut(X, η)`.
pub fn invariant_faces(p: &Polytope, eta: &Direction) -> Vec<Face> {
    let roots = invariants::eta_roots(&invariants::demazure_roots(p), eta);
    invariants::proper_faces(p)
        .into_iter()
        .filter(|f| invariants::is_invariant_face(p, f, &roots))
        .collect()
}

pub fn build_family(p: &Polytope, spec: &FamilySpec, eta: &Direction) -> Vec<FamilyMember> {
    let cones = || {
        let mut out = Vec::new();
        for face in invariants::proper_faces(p) {
            for (a, b) in CONE_FRACTIONS {
                out.push(cone_member(p, &face, &qf(a, b)));
            }
        }
        for face in invariant_faces(p, eta) {
            out.push(cone_member(p, &face, &qi(1)));
        }
        out
    };
    match spec {
        FamilySpec::Standard => {
            let mut v = product_members(p.dim());
            v.extend(cones());
            v
        }
        FamilySpec::Products => product_members(p.dim()),
        FamilySpec::NormalCones => cones(),
        FamilySpec::Custom(m) => m.clone(),
    }
}

/// `D_η^NA / J_T^NA` with the conventions for a vanishing norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ratio {
    Finite(Q),
    /// `D = J_T = 0`; ranks as zero.
    Boundary,
    /// `D < 0 = J_T`; ranks below every finite ratio.
    Destabilizing,
    /// `D > 0 = J_T` (only for non-centred η); ranks above every finite ratio.
    Unbounded,
}

impl Ratio {
    pub fn new(d: &Q, jt: &Q) -> Self {
        if jt.is_positive() {
            Ratio::Finite(d / jt)
        } else if d.is_negative() {
            Ratio::Destabilizing
        } else if d.is_zero() {
            Ratio::Boundary
        } else {
            Ratio::Unbounded
        }
    }

    fn rank(&self) -> (i32, Q) {
        match self {
            Ratio::Destabilizing => (0, Q::zero()),
            Ratio::Finite(q) => (1, q.clone()),
            Ratio::Boundary => (1, Q::zero()),
            Ratio::Unbounded => (2, Q::zero()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Ratio::Finite(q) => fmt_q(q),
            Ratio::Boundary => "0/0".into(),
            Ratio::Destabilizing => "-inf".into(),
            Ratio::Unbounded => "inf".into(),
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub label: String,
    pub kind: ConfigKind,
    pub config: PLConcave,
    pub energies: NAEnergies,
    pub jt: JtMin,
    pub ratio: Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    StableOnFamily,
    SemistableBoundary,
    Destabilized,
    ObstructedMx,
    ObstructedReductivity,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::StableOnFamily => "stable_on_family",
            Verdict::SemistableBoundary => "semistable_boundary",
            Verdict::Destabilized => "destabilized",
            Verdict::ObstructedMx => "obstructed_mX",
            Verdict::ObstructedReductivity => "obstructed_reductivity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Verdict::StableOnFamily,
            Verdict::SemistableBoundary,
            Verdict::Destabilized,
            Verdict::ObstructedMx,
            Verdict::ObstructedReductivity,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::StableOnFamily | Verdict::SemistableBoundary => 0,
            Verdict::Destabilized => 2,
            Verdict::ObstructedMx | Verdict::ObstructedReductivity => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub invariants: Invariants,
    pub family: String,
    pub evaluations: Vec<Evaluation>,
    pub uniform_epsilon: Option<Q>,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn destabilizer(&self) -> Option<&Evaluation> {
        self.evaluations.iter().find(|e| e.energies.d_eta_na.is_negative())
    }
}

/// Shared per-polytope data for repeated evaluations.
pub struct Context<'a> {
    pub polytope: &'a Polytope,
    pub volume: Q,
    pub eta: Direction,
    pub moment_plain: Vec<Q>,
}

impl<'a> Context<'a> {
    pub fn new(p: &'a Polytope, eta: Direction) -> Self {
        Self {
            polytope: p,
            volume: p.volume(),
            moment_plain: weight_moment(p, &eta, JtMode::Plain),
            eta,
        }
    }

    pub fn evaluate(&self, label: &str, kind: &ConfigKind, config: &PLConcave) -> Result<Evaluation, Error> {
        let sub: Subdivision = config.subdivision(self.polytope)?;
        let energies = na_energies_with(self.polytope, &self.volume, &sub, config, &self.eta)?;
        let jt = jt_min_with(&sub, config, &energies, &self.moment_plain, JtMode::Plain)?;
        let ratio = Ratio::new(&energies.d_eta_na, &jt.value);
        Ok(Evaluation {
            label: label.to_string(),
            kind: kind.clone(),
            config: config.clone(),
            energies,
            jt,
            ratio,
        })
    }
}

pub fn analyze(p: &Polytope, family: &FamilySpec, eta: &EtaChoice, mode: Mode) -> Result<StabilityReport, Error> {
    let inv = invariants::compute(p, eta)?;
    let members = build_family(p, family, &inv.eta);
    let ctx = Context::new(p, inv.eta.clone());
    let evaluations = exec::map(mode, &members, |m| ctx.evaluate(&m.label, &m.kind, &m.config))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let uniform_epsilon = evaluations
        .iter()
        .filter(|e| e.jt.value.is_positive())
        .map(|e| &e.energies.d_eta_na / &e.jt.value)
        .min();
    let verdict = verdict_for(&inv, &evaluations);
    Ok(StabilityReport {
        invariants: inv,
        family: family.name().to_string(),
        evaluations,
        uniform_epsilon,
        verdict,
    })
}

pub fn verdict_for(inv: &Invariants, evaluations: &[Evaluation]) -> Verdict {
    if evaluations.iter().any(|e| e.energies.d_eta_na.is_negative()) {
        Verdict::Destabilized
    } else if !inv.m_x.is_positive() {
        Verdict::ObstructedMx
    } else if !inv.reductive {
        Verdict::ObstructedReductivity
    } else if evaluations
        .iter()
        .any(|e| e.kind != ConfigKind::Product && e.energies.d_eta_na.is_zero() && e.jt.value.is_zero())
    {
        Verdict::SemistableBoundary
    } else {
        Verdict::StableOnFamily
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Total affine pieces including the zero piece.
    pub max_pieces: usize,
    pub max_denominator: i64,
    pub max_candidates: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_pieces: 3,
            max_denominator: 2,
            max_candidates: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// First candidate in enumeration order with `D_η^NA < 0`.
    pub destabilizer: Option<Evaluation>,
    /// Candidate with the smallest ratio `D_η^NA / J_T^NA`.
    pub best: Option<Evaluation>,
    pub examined: usize,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("budget exhausted after {examined} candidates")]
pub struct BudgetExhausted {
    pub best: Option<Evaluation>,
    pub examined: usize,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
    #[error(transparent)]
    Domain(#[from] Error),
}

/// Crease `(face, fraction)`; fraction 1 only for `Aut(X, η)`-invariant faces.
fn crease_list(p: &Polytope, eta: &Direction, max_den: i64) -> (Vec<(Face, Q)>, usize) {
    let invariant = invariant_faces(p, eta);
    let mut out: Vec<(Face, Q)> = invariant.iter().map(|f| (f.clone(), qi(1))).collect();
    let full = out.len();
    let mut fracs: Vec<Q> = Vec::new();
    for d in 2..=max_den.max(1) {
        for k in 1..d {
            let q = qf(k, d);
            if !fracs.contains(&q) {
                fracs.push(q);
            }
        }
    }
    fracs.sort();
    for face in invariants::proper_faces(p) {
        for q in &fracs {
            out.push((face.clone(), q.clone()));
        }
    }
    (out, full)
}

/// Enumerate PL configurations built from lattice-distance creases of proper faces at offsets
/// `ε·width` with `ε = k/d`, `d ≤ max_denominator`, combining up to `max_pieces − 1` creases.
pub fn destabilizer_search(
    p: &Polytope,
    eta: &Direction,
    budget: &Budget,
    shuffle_seed: Option<u64>,
    mode: Mode,
) -> Result<SearchOutcome, SearchError> {
    p.require_reflexive()?;
    let (creases, _full) = crease_list(p, eta, budget.max_denominator);
    let ctx = Context::new(p, eta.clone());
    let affine_of = |(face, q): &(Face, Q)| {
        let l = crate::test_config::face_distance(p, face);
        let (w, _) = p.max_affine(&l);
        l.minus(&Affine::constant(p.dim(), q * w))
    };

    let mut cands: Vec<(String, ConfigKind, PLConcave)> = Vec::new();
    let mut seen: HashSet<Vec<Affine>> = HashSet::new();
    let mut exhausted = false;
    let max_creases = budget.max_pieces.saturating_sub(1).max(1);
    'outer: for size in 1..=max_creases {
        let mut combo_err = false;
        crate::polytope::for_each_subset(creases.len(), size, |idx| {
            if combo_err {
                return;
            }
            let data: Vec<Affine> = idx.iter().map(|&i| affine_of(&creases[i])).collect();
            let g = PLConcave::from_creases(p, &data, true);
            if crate::test_config::is_trivial(&g) || !seen.insert(g.pieces().to_vec()) {
                return;
            }
            let (label, kind) = if size == 1 {
                let (face, q) = &creases[idx[0]];
                (
                    format!("normal_cone{}@{}", face_label(face), fmt_q(q)),
                    ConfigKind::NormalCone {
                        center: face.clone(),
                        fraction: q.clone(),
                    },
                )
            } else {
                let parts: Vec<String> = idx
                    .iter()
                    .map(|&i| format!("{}@{}", face_label(&creases[i].0), fmt_q(&creases[i].1)))
                    .collect();
                (format!("creases[{}]", parts.join(";")), ConfigKind::Custom)
            };
            cands.push((label, kind, g));
            if cands.len() >= budget.max_candidates {
                combo_err = true;
            }
        });
        if combo_err {
            exhausted = true;
            break 'outer;
        }
    }
    if let Some(seed) = shuffle_seed {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        cands.shuffle(&mut rng);
    }

    let mut best: Option<Evaluation> = None;
    let mut examined = 0;
    for chunk in cands.chunks(256) {
        let evals = exec::map(mode, chunk, |(l, k, g)| ctx.evaluate(l, k, g))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        examined += evals.len();
        for e in evals {
            if e.energies.d_eta_na.is_negative() {
                return Ok(SearchOutcome {
                    best: Some(e.clone()),
                    destabilizer: Some(e),
                    examined,
                });
            }
            if best.as_ref().is_none_or(|b| e.ratio < b.ratio) {
                best = Some(e);
            }
        }
    }
    if exhausted {
        return Err(BudgetExhausted { best, examined }.into());
    }
    Ok(SearchOutcome {
        destabilizer: None,
        best,
        examined,
    })
}
