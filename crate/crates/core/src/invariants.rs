//! Duistermaat–Heckman integrals, the Futaki character, the extremal vector and Demazure roots.

use num_traits::{One, Signed, Zero};

use crate::affine::Affine;
use crate::error::Error;
use crate::polytope::Polytope;
use crate::rational::{dot, neg, qi, zeros, RationalVec, Q};

/// Sign fixing the Futaki character against the finite-k weight filtration.
pub const ORIENTATION: i64 = 1;

/// `ξ = (μ, c)` with Hamiltonian `h(x) = ⟨μ, x⟩ + c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    pub mu: RationalVec,
    pub c: Q,
}

impl Direction {
    pub fn new(mu: RationalVec, c: Q) -> Self {
        Self { mu, c }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(zeros(n), Q::zero())
    }

    /// The identical subgroup `1 = (0, 1)`.
    pub fn identity(n: usize) -> Self {
        Self::new(zeros(n), Q::one())
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Self::new(crate::rational::unit(n, i), Q::zero())
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn hamiltonian(&self) -> Affine {
        Affine::new(self.mu.clone(), self.c.clone())
    }

    /// `1 + h`.
    pub fn weight(&self) -> Affine {
        Affine::new(self.mu.clone(), &self.c + Q::one())
    }

    pub fn negated(&self) -> Self {
        Self::new(neg(&self.mu), -&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.mu.iter().all(|x| x.is_zero())
    }

    /// Coordinates in the basis `(e_1, …, e_n, 1)`.
    pub fn coords(&self) -> RationalVec {
        let mut v = self.mu.clone();
        v.push(self.c.clone());
        v
    }

    pub fn from_coords(v: &[Q]) -> Self {
        let n = v.len() - 1;
        Self::new(v[..n].to_vec(), v[n].clone())
    }
}

pub fn volume(p: &Polytope) -> Q {
    p.volume()
}

pub fn barycenter(p: &Polytope) -> RationalVec {
    let v = p.volume();
    (0..p.dim())
        .map(|i| p.integrate_product(&[Affine::coordinate(p.dim(), i)]).unwrap() / &v)
        .collect()
}

/// `(1/V) ∫_P h_ξ h_ζ dx`.
pub fn pairing(p: &Polytope, xi: &Direction, zeta: &Direction) -> Q {
    p.integrate_product(&[xi.hamiltonian(), zeta.hamiltonian()]).unwrap() / p.volume()
}

/// Gram matrix over `(e_1, …, e_n, 1)`.
pub fn gram(p: &Polytope) -> Vec<RationalVec> {
    let n = p.dim();
    let v = p.volume();
    let basis: Vec<Affine> = (0..n)
        .map(|i| Affine::coordinate(n, i))
        .chain(std::iter::once(Affine::constant(n, Q::one())))
        .collect();
    let mut g = vec![zeros(n + 1); n + 1];
    for i in 0..=n {
        for j in i..=n {
            let x = p.integrate_product(&[basis[i].clone(), basis[j].clone()]).unwrap() / &v;
            g[j][i] = x.clone();
            g[i][j] = x;
        }
    }
    g
}

pub fn gram_form(g: &[RationalVec], x: &[Q], y: &[Q]) -> Q {
    let gy: RationalVec = g.iter().map(|row| dot(row, y)).collect();
    dot(x, &gy)
}

/// `F(ξ) = h_ξ(0) − (1/V)∫_P h_ξ = −⟨μ, barycenter⟩`.
pub fn futaki(p: &Polytope, xi: &Direction) -> Result<Q, Error> {
    p.require_reflexive()?;
    Ok(futaki_with(&barycenter(p), xi))
}

pub fn futaki_with(bary: &[Q], xi: &Direction) -> Q {
    -dot(&xi.mu, bary) * qi(ORIENTATION)
}

/// `(F(e_1), …, F(e_n))`; `F(1)` is always zero.
pub fn futaki_vector(p: &Polytope) -> Result<RationalVec, Error> {
    p.require_reflexive()?;
    let b = barycenter(p);
    Ok((0..p.dim())
        .map(|i| futaki_with(&b, &Direction::basis(p.dim(), i)))
        .collect())
}

/// Solve `Gram·η = (F(e_1), …, F(e_n), F(1))`.
pub fn extremal(p: &Polytope) -> Result<Direction, Error> {
    let mut f = futaki_vector(p)?;
    f.push(Q::zero());
    let g = gram(p);
    let eta = crate::rational::solve(g, f).ok_or(Error::SingularGram)?;
    let eta = Direction::from_coords(&eta);
    debug_assert!(
        pairing(p, &Direction::identity(p.dim()), &eta).is_zero(),
        "extremal vector is not centred"
    );
    Ok(eta)
}

/// `min_P (1 + h_η)`, attained at a vertex.
pub fn m_x(p: &Polytope, eta: &Direction) -> Q {
    p.min_affine(&eta.weight()).0
}

/// Centre an arbitrary `μ` so that `∫_P h = 0`.
pub fn centred(p: &Polytope, mu: RationalVec) -> Direction {
    let b = barycenter(p);
    let c = -dot(&mu, &b);
    Direction::new(mu, c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub alpha: Vec<i64>,
    /// Index of the facet whose ray pairs to −1 with `alpha`.
    pub facet: usize,
}

/// Demazure roots: `α ∈ M` with `⟨α, u_ρ⟩ = −1` for exactly one ray `u_ρ = −v_ρ` and `≥ 0` for
/// the others. Such `α` satisfy `⟨α, v⟩ ≤ 1` everywhere, so they are lattice points of `P`.
pub fn demazure_roots(p: &Polytope) -> Vec<Root> {
    let mut out = Vec::new();
    for a in p.lattice_points() {
        let aq: RationalVec = a.iter().map(|&x| qi(x)).collect();
        let pairings: Vec<Q> = p.facets().iter().map(|f| dot(&aq, &f.normal)).collect();
        let ones: Vec<usize> = (0..pairings.len()).filter(|&i| pairings[i].is_one()).collect();
        if ones.len() == 1
            && pairings
                .iter()
                .enumerate()
                .all(|(i, x)| i == ones[0] || !x.is_positive())
        {
            out.push(Root {
                alpha: a,
                facet: ones[0],
            });
        }
    }
    out
}

/// Roots orthogonal to `η`, i.e. the roots of `Aut(X, η)`.
pub fn eta_roots(roots: &[Root], eta: &Direction) -> Vec<Root> {
    roots
        .iter()
        .filter(|r| {
            let a: RationalVec = r.alpha.iter().map(|&x| qi(x)).collect();
            dot(&a, &eta.mu).is_zero()
        })
        .cloned()
        .collect()
}

pub fn is_symmetric(roots: &[Root]) -> bool {
    roots.iter().all(|r| {
        let m: Vec<i64> = r.alpha.iter().map(|x| -x).collect();
        roots.iter().any(|s| s.alpha == m)
    })
}

pub fn demazure_reductivity(p: &Polytope, eta: &Direction) -> (Vec<Root>, bool) {
    let roots = demazure_roots(p);
    let s = eta_roots(&roots, eta);
    let red = is_symmetric(&s);
    (roots, red)
}

/// A torus-invariant proper face, recorded by the facets containing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub facets: Vec<usize>,
}

/// Proper faces of `P` ordered by decreasing dimension (facets first, vertices last).
pub fn proper_faces(p: &Polytope) -> Vec<Face> {
    let n = p.dim();
    let mut by_dim: Vec<Vec<Face>> = vec![Vec::new(); n];
    for (vi, _) in p.vertices().iter().enumerate() {
        let through: Vec<usize> = (0..p.facets().len())
            .filter(|&f| p.facet_vertices(f).contains(&vi))
            .collect();
        let f = Face { facets: through };
        if !by_dim[0].contains(&f) {
            by_dim[0].push(f);
        }
    }
    for i in 0..p.facets().len() {
        by_dim[n - 1].push(Face { facets: vec![i] });
    }
    if n == 3 {
        for i in 0..p.facets().len() {
            for j in i + 1..p.facets().len() {
                let common = p
                    .facet_vertices(i)
                    .iter()
                    .filter(|v| p.facet_vertices(j).contains(v))
                    .count();
                if common >= 2 {
                    by_dim[1].push(Face { facets: vec![i, j] });
                }
            }
        }
    }
    if n == 1 {
        // vertices and facets coincide
        return by_dim.pop().unwrap();
    }
    by_dim.into_iter().rev().flatten().collect()
}

/// `V(σ)` is preserved by the root subgroup of `α` unless `α`'s distinguished ray lies in `σ`
/// and no other ray of `σ` pairs positively with `α`.
pub fn is_invariant_face(p: &Polytope, face: &Face, roots: &[Root]) -> bool {
    roots.iter().all(|r| {
        if !face.facets.contains(&r.facet) {
            return true;
        }
        let a: RationalVec = r.alpha.iter().map(|&x| qi(x)).collect();
        face.facets
            .iter()
            .any(|&f| f != r.facet && (-dot(&a, &p.facets()[f].normal)) >= Q::one())
    })
}

#[derive(Debug, Clone)]
pub struct Invariants {
    pub volume: Q,
    pub barycenter: RationalVec,
    pub futaki: RationalVec,
    pub eta: Direction,
    pub m_x: Q,
    pub roots: Vec<Root>,
    pub reductive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaChoice {
    Auto,
    Zero,
    Given(Direction),
}

impl EtaChoice {
    pub fn resolve(&self, p: &Polytope) -> Result<Direction, Error> {
        match self {
            EtaChoice::Auto => extremal(p),
            EtaChoice::Zero => Ok(Direction::zero(p.dim())),
            EtaChoice::Given(d) => Ok(d.clone()),
        }
    }
}

pub fn compute(p: &Polytope, choice: &EtaChoice) -> Result<Invariants, Error> {
    p.require_reflexive()?;
    let volume = p.volume();
    let barycenter = barycenter(p);
    let futaki: RationalVec = (0..p.dim())
        .map(|i| futaki_with(&barycenter, &Direction::basis(p.dim(), i)))
        .collect();
    let eta = choice.resolve(p)?;
    let m_x = m_x(p, &eta);
    let (roots, reductive) = demazure_reductivity(p, &eta);
    Ok(Invariants {
        volume,
        barycenter,
        futaki,
        eta,
        m_x,
        roots,
        reductive,
    })
}
