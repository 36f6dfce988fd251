//! Exact convex polytopes in dimension at most three.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::affine::Affine;
use crate::error::Error;
use crate::rational::{
    dot, factorial, from_ints, is_integer_vec, normal_of, primitive, qi, rank, sub, zeros, RationalVec, Q,
};

pub const MAX_DIM: usize = 3;
pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Primitive integer outward normal.
    pub normal: RationalVec,
    pub offset: Q,
}

impl Facet {
    /// Lattice distance `c - ⟨v, x⟩`, nonnegative on the polytope.
    pub fn distance(&self) -> Affine {
        Affine::new(self.normal.iter().map(|x| -x).collect(), self.offset.clone())
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }
}

/// Full-dimensional convex polytope `{x : ⟨v_i, x⟩ ≤ c_i}` with both representations.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<RationalVec>,
    facets: Vec<Facet>,
    /// `facet_vertices[i]` indexes the vertices on facet `i`.
    facet_vertices: Vec<Vec<usize>>,
    reflexive: bool,
    origin_interior: bool,
}

pub type ReflexivePolytope = Polytope;

/// `(n+1)` vertices of a simplex.
pub type Simplex = Vec<RationalVec>;

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Polytope {
    pub fn from_vertices(points: &[RationalVec]) -> Result<Self, Error> {
        let mut pts: Vec<RationalVec> = points.to_vec();
        let Some(n) = pts.first().map(|p| p.len()) else {
            return Err(Error::DegenerateInput("no points".into()));
        };
        if n == 0 {
            return Err(Error::DegenerateInput("zero-dimensional points".into()));
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n));
        }
        if pts.iter().any(|p| p.len() != n) {
            return Err(Error::DegenerateInput("points of mixed dimension".into()));
        }
        pts.sort();
        pts.dedup();
        let diffs: Vec<RationalVec> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
        if rank(diffs) < n {
            return Err(Error::DegenerateInput(format!(
                "points do not span a {n}-dimensional polytope"
            )));
        }

        let mut facets: Vec<Facet> = Vec::new();
        for_each_subset(pts.len(), n, |idx| {
            let base = &pts[idx[0]];
            let rows: Vec<RationalVec> = idx[1..].iter().map(|&i| sub(&pts[i], base)).collect();
            if rank(rows.clone()) < n - 1 {
                return;
            }
            let nrm = normal_of(&rows, n);
            let c = dot(&nrm, base);
            let mut above = false;
            let mut below = false;
            for p in &pts {
                match dot(&nrm, p).cmp(&c) {
                    Ordering::Greater => above = true,
                    Ordering::Less => below = true,
                    Ordering::Equal => {}
                }
                if above && below {
                    return;
                }
            }
            let oriented: RationalVec = if above { nrm.iter().map(|x| -x).collect() } else { nrm };
            let normal = from_ints(&primitive(&oriented));
            let offset = dot(&normal, base);
            if !facets.iter().any(|f| f.normal == normal) {
                facets.push(Facet { normal, offset });
            }
        });
        facets.sort_by(|a, b| a.normal.cmp(&b.normal));

        let vertices: Vec<RationalVec> = pts
            .into_iter()
            .filter(|p| {
                let tight: Vec<RationalVec> = facets
                    .iter()
                    .filter(|f| f.slack(p).is_zero())
                    .map(|f| f.normal.clone())
                    .collect();
                rank(tight) == n
            })
            .collect();
        Ok(Self::assemble(n, vertices, facets))
    }

    fn assemble(dim: usize, vertices: Vec<RationalVec>, facets: Vec<Facet>) -> Self {
        let facet_vertices = facets
            .iter()
            .map(|f| {
                (0..vertices.len())
                    .filter(|&i| f.slack(&vertices[i]).is_zero())
                    .collect()
            })
            .collect();
        let origin_interior = facets.iter().all(|f| f.offset.is_positive());
        let reflexive =
            origin_interior && facets.iter().all(|f| f.offset.is_one()) && vertices.iter().all(|v| is_integer_vec(v));
        Self {
            dim,
            vertices,
            facets,
            facet_vertices,
            reflexive,
            origin_interior,
        }
    }

    /// Intersection of half-spaces `⟨a, x⟩ ≤ b`; `None` when empty or lower-dimensional.
    pub fn from_halfspaces(dim: usize, constraints: &[(RationalVec, Q)]) -> Option<Self> {
        let mut pts: Vec<RationalVec> = Vec::new();
        for_each_subset(constraints.len(), dim, |idx| {
            let a: Vec<RationalVec> = idx.iter().map(|&i| constraints[i].0.clone()).collect();
            let b: RationalVec = idx.iter().map(|&i| constraints[i].1.clone()).collect();
            let Some(x) = crate::rational::solve(a, b) else {
                return;
            };
            if constraints.iter().all(|(a, b)| dot(a, &x) <= *b) {
                pts.push(x);
            }
        });
        pts.sort();
        pts.dedup();
        if pts.len() <= dim {
            return None;
        }
        Self::from_vertices(&pts).ok()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RationalVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        &self.facet_vertices[i]
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexive
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    pub fn require_reflexive(&self) -> Result<(), Error> {
        if self.reflexive {
            Ok(())
        } else {
            Err(Error::NotReflexive)
        }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    /// Star triangulation from the origin (or the vertex centroid when the origin is not interior).
    pub fn triangulation(&self) -> Vec<Simplex> {
        let apex = if self.origin_interior {
            zeros(self.dim)
        } else {
            let k = qi(self.vertices.len() as i64);
            (0..self.dim)
                .map(|j| self.vertices.iter().map(|v| v[j].clone()).sum::<Q>() / &k)
                .collect()
        };
        let mut out = Vec::new();
        for (fi, f) in self.facets.iter().enumerate() {
            if f.slack(&apex).is_zero() {
                continue;
            }
            let verts: Vec<RationalVec> = self.facet_vertices[fi]
                .iter()
                .map(|&i| self.vertices[i].clone())
                .collect();
            for cell in facet_cells(&verts, &f.normal, self.dim) {
                let mut s = Vec::with_capacity(self.dim + 1);
                s.push(apex.clone());
                s.extend(cell);
                out.push(s);
            }
        }
        out
    }

    pub fn volume(&self) -> Q {
        self.triangulation().iter().map(simplex_volume).sum()
    }

    pub fn integrate_monomial(&self, a: &[u32]) -> Result<Q, Error> {
        assert_eq!(a.len(), self.dim);
        let forms: Vec<Affine> = a
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(Affine::coordinate(self.dim, i), k as usize))
            .collect();
        self.integrate_product(&forms)
    }

    /// `∫_P Π ℓ_j dx` for affine forms `ℓ_j`, at most `MAX_DEGREE` of them.
    pub fn integrate_product(&self, forms: &[Affine]) -> Result<Q, Error> {
        if forms.len() > MAX_DEGREE {
            return Err(Error::DegreeUnsupported(forms.len()));
        }
        Ok(self
            .triangulation()
            .iter()
            .map(|s| integrate_product_simplex(s, forms))
            .sum())
    }

    /// Maximum of an affine form over the vertices. Ties go to the smallest vertex in reverse
    /// lexicographic order (last coordinate compared first).
    pub fn max_affine(&self, l: &Affine) -> (Q, RationalVec) {
        let mut best: Option<(Q, &RationalVec)> = None;
        for v in &self.vertices {
            let val = l.eval(v);
            let better = match &best {
                None => true,
                Some((b, w)) => val > *b || (val == *b && colex(v, w) == Ordering::Less),
            };
            if better {
                best = Some((val, v));
            }
        }
        let (val, v) = best.expect("polytope has vertices");
        (val, v.clone())
    }

    pub fn min_affine(&self, l: &Affine) -> (Q, RationalVec) {
        let (v, x) = self.max_affine(&l.scaled(&qi(-1)));
        (-v, x)
    }

    /// Lattice points of the dilate `kP`.
    pub fn lattice_points_dilated(&self, k: i64) -> Vec<Vec<i64>> {
        let n = self.dim;
        let lo: Vec<i64> = (0..n)
            .map(|j| {
                let m = self.vertices.iter().map(|v| &v[j] * qi(k)).min().unwrap();
                m.floor().to_integer().to_i64().unwrap()
            })
            .collect();
        let hi: Vec<i64> = (0..n)
            .map(|j| {
                let m = self.vertices.iter().map(|v| &v[j] * qi(k)).max().unwrap();
                m.ceil().to_integer().to_i64().unwrap()
            })
            .collect();
        // ⟨v, χ⟩·den ≤ k·num with integer data
        let rows: Vec<(Vec<i128>, i128, i128)> = self
            .facets
            .iter()
            .map(|f| {
                let v = f.normal.iter().map(|x| x.to_integer().to_i128().unwrap()).collect();
                let num = f.offset.numer().to_i128().unwrap();
                let den = f.offset.denom().to_i128().unwrap();
                (v, num * k as i128, den)
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let inside = rows.iter().all(|(v, rhs, den)| {
                let s: i128 = v.iter().zip(&cur).map(|(a, &b)| a * b as i128).sum();
                s * den <= *rhs
            });
            if inside {
                out.push(cur.clone());
            }
            let mut j = n;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if cur[j] < hi[j] {
                    cur[j] += 1;
                    for (jj, c) in cur.iter_mut().enumerate().skip(j + 1) {
                        *c = lo[jj];
                    }
                    break;
                }
            }
        }
    }

    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        self.lattice_points_dilated(1)
    }

    /// Image under the unimodular (or any invertible) integer matrix `a` acting on points.
    pub fn transformed(&self, a: &[Vec<i64>]) -> Result<Self, Error> {
        let pts: Vec<RationalVec> = self
            .vertices
            .iter()
            .map(|v| {
                a.iter()
                    .map(|row| row.iter().zip(v).map(|(&r, x)| qi(r) * x).sum())
                    .collect()
            })
            .collect();
        Self::from_vertices(&pts)
    }
}

fn colex(a: &[Q], b: &[Q]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// Split a facet (vertices on a common hyperplane with normal `nrm`) into `(n-1)`-simplices.
fn facet_cells(verts: &[RationalVec], nrm: &[Q], n: usize) -> Vec<Vec<RationalVec>> {
    match n {
        1 | 2 => vec![verts.to_vec()],
        3 => {
            let mut vs = verts.to_vec();
            vs.sort();
            let v0 = vs.remove(0);
            // the other vertices are seen from v0 within a half-plane; order them by orientation
            vs.sort_by(|a, b| {
                let cr = cross3(&sub(a, &v0), &sub(b, &v0));
                dot(&cr, nrm).cmp(&Q::zero()).reverse()
            });
            vs.windows(2)
                .map(|w| vec![v0.clone(), w[0].clone(), w[1].clone()])
                .collect()
        }
        _ => unreachable!("dimension capped at {MAX_DIM}"),
    }
}

fn cross3(a: &[Q], b: &[Q]) -> RationalVec {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn simplex_volume(s: &Simplex) -> Q {
    let n = s.len() - 1;
    let rows: Vec<RationalVec> = s[1..].iter().map(|v| sub(v, &s[0])).collect();
    crate::rational::det(rows).abs() / Q::from_integer(factorial(n))
}

/// `∫_S Π ℓ_j` by expansion in barycentric coordinates and the Dirichlet moment formula
/// `∫_S λ^β = n!·vol(S)·β!/(n+|β|)!`.
pub fn integrate_product_simplex(s: &Simplex, forms: &[Affine]) -> Q {
    let n = s.len() - 1;
    let vol = simplex_volume(s);
    if vol.is_zero() {
        return Q::zero();
    }
    // each form is linear in λ with coefficients ℓ(v_i)
    let lin: Vec<RationalVec> = forms.iter().map(|f| s.iter().map(|v| f.eval(v)).collect()).collect();
    let m = forms.len();
    let mut total = Q::zero();
    let mut beta = vec![0u32; n + 1];
    expand(&lin, 0, Q::one(), &mut beta, &mut total, n);
    total * vol * Q::from_integer(factorial(n)) / Q::from_integer(factorial(n + m))
}

// Expand over ordered assignments of a barycentric index to each factor; an assignment with
// multi-index β contributes Πcoef·β!, the numerator of its Dirichlet moment.
fn expand(lin: &[RationalVec], j: usize, coef: Q, beta: &mut Vec<u32>, total: &mut Q, n: usize) {
    if coef.is_zero() {
        return;
    }
    if j == lin.len() {
        let w: BigInt = beta.iter().map(|&b| factorial(b as usize)).product();
        *total += coef * Q::from_integer(w);
        return;
    }
    for i in 0..=n {
        beta[i] += 1;
        expand(lin, j + 1, &coef * &lin[j][i], beta, total, n);
        beta[i] -= 1;
    }
}

pub(crate) fn for_each_subset(len: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > len {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == len - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
