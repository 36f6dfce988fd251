//! Discrete potentials `psi(y) = A(y - a) + u(y)` with `A` a log-sum-exp reference.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use torus_soliton_core::exec::{self, Mode};

use crate::ansatz::{Ansatz, Jet};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPotential {
    pub grid: Grid,
    /// The reference `psi_0 = A`.
    pub reference: Ansatz,
    /// Translation applied to the smooth part.
    pub shift: [f64; 2],
    /// Grid correction, differentiated by central differences closed by [`Stencil`].
    pub u: Vec<f64>,
}

/// Rows (or single nodes in 1-D) per parallel chunk.
pub(crate) fn chunk_len(grid: &Grid) -> usize {
    if grid.dim == 1 {
        grid.n.div_ceil(8).max(64)
    } else {
        grid.n * 4
    }
}

impl ConvexPotential {
    pub fn reference(grid: Grid, reference: Ansatz) -> Self {
        assert_eq!(grid.dim, reference.dim);
        let u = vec![0.0; grid.len()];
        Self {
            grid,
            reference,
            shift: [0.0; 2],
            u,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn with_u(&self, u: Vec<f64>) -> Self {
        assert_eq!(u.len(), self.grid.len());
        Self { u, ..self.clone() }
    }

    /// Same reference, `psi(y - a)`: the smooth part is shifted exactly, `u` is interpolated and
    /// clamped at the box.
    pub fn translated(&self, a: [f64; 2]) -> Self {
        let g = &self.grid;
        let u = if self.u.iter().all(|&x| x == 0.0) {
            self.u.clone()
        } else {
            (0..g.len())
                .map(|k| {
                    let y = g.coord(k);
                    g.interpolate(&self.u, [y[0] - a[0], y[1] - a[1]])
                })
                .collect()
        };
        Self {
            shift: [self.shift[0] + a[0], self.shift[1] + a[1]],
            u,
            ..self.clone()
        }
    }

    /// Nodal values of `psi - psi_0`.
    pub fn relative(&self, mode: Mode) -> Vec<f64> {
        let g = &self.grid;
        let parts = exec::map_chunks(mode, g.len(), chunk_len(g), |r| {
            r.map(|k| {
                let y = g.coord(k);
                let s = [y[0] - self.shift[0], y[1] - self.shift[1]];
                self.reference.value(s) + self.u[k] - self.reference.value(y)
            })
            .collect::<Vec<_>>()
        });
        parts.concat()
    }

    pub fn values(&self, mode: Mode) -> Vec<f64> {
        let g = &self.grid;
        let parts = exec::map_chunks(mode, g.len(), chunk_len(g), |r| {
            r.map(|k| {
                let y = g.coord(k);
                self.reference.value([y[0] - self.shift[0], y[1] - self.shift[1]]) + self.u[k]
            })
            .collect::<Vec<_>>()
        });
        parts.concat()
    }

    pub fn stencil(&self) -> Stencil {
        Stencil::new(&self.grid, &self.reference, self.shift)
    }

    pub fn jets(&self, mode: Mode) -> Vec<Jet> {
        let st = self.stencil();
        self.jets_with(&st, mode)
    }

    pub fn jets_with(&self, st: &Stencil, mode: Mode) -> Vec<Jet> {
        let g = &self.grid;
        let parts = exec::map_chunks(mode, g.len(), chunk_len(g), |r| {
            r.map(|k| {
                let y = g.coord(k);
                let mut j = self.reference.jet([y[0] - self.shift[0], y[1] - self.shift[1]]);
                let d = fd_jet(g, st, &self.u, k);
                j.val += d.val;
                for a in 0..2 {
                    j.grad[a] += d.grad[a];
                }
                for a in 0..3 {
                    j.hess[a] += d.hess[a];
                }
                j
            })
            .collect::<Vec<_>>()
        });
        parts.concat()
    }

    /// Smallest second difference of `psi` along the axes and (in 2-D) both diagonals, over
    /// interior stencils.
    pub fn min_second_difference(&self, mode: Mode) -> f64 {
        let v = self.values(mode);
        let g = &self.grid;
        let n = g.n;
        let mut m = f64::INFINITY;
        if g.dim == 1 {
            for i in 1..n - 1 {
                m = m.min(v[i + 1] - 2.0 * v[i] + v[i - 1]);
            }
            return m;
        }
        let at = |i: usize, j: usize| v[g.index([i, j])];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = 2.0 * at(i, j);
                m = m
                    .min(at(i + 1, j) + at(i - 1, j) - c)
                    .min(at(i, j + 1) + at(i, j - 1) - c)
                    .min(at(i + 1, j + 1) + at(i - 1, j - 1) - c)
                    .min(at(i + 1, j - 1) + at(i - 1, j + 1) - c);
            }
        }
        m
    }

    pub fn is_discretely_convex(&self, tol: f64, mode: Mode) -> bool {
        self.min_second_difference(mode) >= -tol
    }
}

/// Linear combination of nodal values.
pub type Comb = Vec<(usize, f64)>;

/// Largest tangential step, in cells, when tracing back from a face.
const RATIO_CAP: f64 = 2.0;

/// Boundary condition at the box faces of a 2-D grid.
///
/// The conormal condition `<n, A grad u> = 0` with `A = H_0^{-1}` of the reference says `u` is
/// constant along `A n`. Far out the reference is affine along the normal cone, so `A n` follows
/// the facet normal the face cuts (the mirror rule for axis-parallel normals). A boundary value
/// is tied to the value one cell back along `A n`, and its derivatives are read off the interior
/// at the same point.
#[derive(Debug, Clone, Default)]
pub struct Stencil {
    ties: HashMap<usize, Comb>,
    /// Interior nodes whose central differences stand in for those at a boundary node.
    sources: HashMap<usize, Comb>,
}

impl Stencil {
    pub fn new(g: &Grid, reference: &Ansatz, shift: [f64; 2]) -> Self {
        let mut ties = HashMap::new();
        let mut sources = HashMap::new();
        if g.dim == 1 {
            return Self { ties, sources };
        }
        let last = g.n - 1;
        let inward = |t: usize| if t == 0 { 1 } else { t - 1 };
        for k in 0..g.len() {
            if !g.on_boundary(k) {
                continue;
            }
            let [i, j] = g.split(k);
            let xface = i == 0 || i == last;
            let yface = j == 0 || j == last;
            if xface && yface {
                let m = g.index([inward(i), inward(j)]);
                ties.insert(k, vec![(m, 1.0)]);
                sources.insert(k, vec![(m, 1.0)]);
                continue;
            }
            // axis `a` is normal to the face, `b` runs along it
            let a = if xface { 0 } else { 1 };
            let (s, t) = if a == 0 { (i, j) } else { (j, i) };
            let node = |s: usize, t: usize| if a == 0 { g.index([s, t]) } else { g.index([t, s]) };
            let y = g.coord(k);
            let h = reference.jet([y[0] - shift[0], y[1] - shift[1]]).hess;
            // A e_a is proportional to (1, r) in (a, b) components
            let r = if a == 0 { -h[1] / h[2] } else { -h[1] / h[0] };
            let r = if r.is_finite() {
                r.clamp(-RATIO_CAP, RATIO_CAP)
            } else {
                0.0
            };
            let sg = if s == 0 { -1.0 } else { 1.0 };
            let q = t as f64 - sg * r * g.h[a] / g.h[1 - a];
            let line = inward(s);
            let along = |lo: f64, hi: f64| {
                let q = q.clamp(lo, hi);
                let base = (q.floor() as usize).min(hi as usize - 1);
                let f = q - base as f64;
                let mut w = vec![(node(line, base), 1.0 - f)];
                if f > 1e-14 {
                    w.push((node(line, base + 1), f));
                }
                w
            };
            ties.insert(k, along(0.0, last as f64));
            sources.insert(k, along(1.0, (last - 1) as f64));
        }
        Self { ties, sources }
    }

    /// The boundary condition at `k`, if it is a boundary node of a 2-D grid.
    #[inline]
    pub fn tie(&self, k: usize) -> Option<&Comb> {
        self.ties.get(&k)
    }
}

/// Central differences of a grid function, closed at the box by `st`.
#[inline]
pub fn fd_jet(g: &Grid, st: &Stencil, u: &[f64], k: usize) -> Jet {
    let hx = g.h[0];
    let c = u[k];
    if g.dim == 1 {
        let i = k as isize;
        let um = u[g.reflect(i - 1)];
        let up = u[g.reflect(i + 1)];
        return Jet {
            val: c,
            grad: [(up - um) / (2.0 * hx), 0.0],
            hess: [(up - 2.0 * c + um) / (hx * hx), 0.0, 0.0],
        };
    }
    if let Some(w) = st.sources.get(&k) {
        let mut out = Jet {
            val: c,
            ..Jet::default()
        };
        for &(m, x) in w {
            let d = fd_jet(g, st, u, m);
            for a in 0..2 {
                out.grad[a] += x * d.grad[a];
            }
            for a in 0..3 {
                out.hess[a] += x * d.hess[a];
            }
        }
        return out;
    }
    let hy = g.h[1];
    let [i, j] = g.split(k);
    let at = |di: isize, dj: isize| u[g.index([(i as isize + di) as usize, (j as isize + dj) as usize])];
    Jet {
        val: c,
        grad: [(at(1, 0) - at(-1, 0)) / (2.0 * hx), (at(0, 1) - at(0, -1)) / (2.0 * hy)],
        hess: [
            (at(1, 0) - 2.0 * c + at(-1, 0)) / (hx * hx),
            (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hx * hy),
            (at(0, 1) - 2.0 * c + at(0, -1)) / (hy * hy),
        ],
    }
}

#[inline]
pub fn det(dim: usize, h: &[f64; 3]) -> f64 {
    if dim == 1 {
        h[0]
    } else {
        h[0] * h[2] - h[1] * h[1]
    }
}

#[inline]
pub fn positive_definite(dim: usize, h: &[f64; 3]) -> bool {
    h[0] > 0.0 && det(dim, h) > 0.0
}
