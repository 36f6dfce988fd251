//! Log-sum-exp reference potentials `log sum_m w_m exp<m, y>` whose gradient image is the
//! convex hull of the exponents.

use serde::{Deserialize, Serialize};
use torus_soliton_core::Polytope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ansatz {
    pub dim: usize,
    /// (log weight, exponent).
    pub terms: Vec<(f64, [f64; 2])>,
    /// Outward normals and offsets `<v, x> <= c` of the hull of the exponents.
    pub facets: Vec<([f64; 2], f64)>,
}

/// Value, gradient and Hessian (xx, xy, yy) at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub val: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

impl Ansatz {
    /// Unit weights on every lattice point of `p`.
    pub fn lattice(p: &Polytope) -> Self {
        let pts: Vec<Vec<f64>> = p
            .lattice_points()
            .into_iter()
            .map(|m| m.into_iter().map(|x| x as f64).collect())
            .collect();
        Self::with_weights(p.dim(), &pts, &vec![1.0; pts.len()])
    }

    pub fn with_weights(dim: usize, points: &[Vec<f64>], weights: &[f64]) -> Self {
        assert!((1..=2).contains(&dim));
        assert_eq!(points.len(), weights.len());
        let terms = points
            .iter()
            .zip(weights)
            .map(|(m, &w)| {
                assert!(w > 0.0 && m.len() == dim);
                let mut e = [0.0; 2];
                e[..dim].copy_from_slice(m);
                (w.ln(), e)
            })
            .collect::<Vec<_>>();
        let facets = hull_facets(dim, &terms.iter().map(|t| t.1).collect::<Vec<_>>());
        Self { dim, terms, facets }
    }

    /// Facets with slack `c - <v, x>` below `tol` at `x`.
    pub fn tight_facets(&self, x: [f64; 2], tol: f64) -> Vec<[f64; 2]> {
        self.facets
            .iter()
            .filter(|(v, c)| c - v[0] * x[0] - v[1] * x[1] < tol)
            .map(|(v, _)| *v)
            .collect()
    }

    /// `log(e^{-y} + 2 + e^{y})`, the Kähler–Einstein potential of the projective line.
    pub fn projective_line() -> Self {
        Self::with_weights(1, &[vec![-1.0], vec![0.0], vec![1.0]], &[1.0, 2.0, 1.0])
    }

    /// Product of the line potential with itself on the square.
    pub fn projective_line_squared() -> Self {
        let mut pts = Vec::new();
        let mut w = Vec::new();
        let b = [1.0, 2.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                pts.push(vec![i as f64 - 1.0, j as f64 - 1.0]);
                w.push(b[i] * b[j]);
            }
        }
        Self::with_weights(2, &pts, &w)
    }

    #[inline]
    pub fn jet(&self, z: [f64; 2]) -> Jet {
        let d = self.dim;
        let mut top = f64::NEG_INFINITY;
        for (lw, m) in &self.terms {
            let s = lw + m[0] * z[0] + if d == 2 { m[1] * z[1] } else { 0.0 };
            top = top.max(s);
        }
        let (mut z0, mut m1) = (0.0, [0.0; 2]);
        for (lw, m) in &self.terms {
            let s = lw + m[0] * z[0] + if d == 2 { m[1] * z[1] } else { 0.0 };
            let e = (s - top).exp();
            z0 += e;
            m1[0] += e * m[0];
            m1[1] += e * m[1];
        }
        let g = [m1[0] / z0, m1[1] / z0];
        // centred second moments: no cancellation far out, where the Hessian is tiny
        let mut m2 = [0.0; 3];
        for (lw, m) in &self.terms {
            let s = lw + m[0] * z[0] + if d == 2 { m[1] * z[1] } else { 0.0 };
            let e = (s - top).exp();
            let (a, b) = (m[0] - g[0], m[1] - g[1]);
            m2[0] += e * a * a;
            m2[1] += e * a * b;
            m2[2] += e * b * b;
        }
        Jet {
            val: top + z0.ln(),
            grad: g,
            hess: [m2[0] / z0, m2[1] / z0, m2[2] / z0],
        }
    }

    pub fn value(&self, z: [f64; 2]) -> f64 {
        self.jet(z).val
    }
}

/// Monotone-chain hull in the plane; unit outward normals.
fn hull_facets(dim: usize, pts: &[[f64; 2]]) -> Vec<([f64; 2], f64)> {
    if dim == 1 {
        let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return vec![([-1.0, 0.0], -lo), ([1.0, 0.0], hi)];
    }
    let mut p = pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut h: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0.0 {
                h.pop();
            }
            h.push(q);
        }
        h.pop();
    }
    (0..h.len())
        .map(|i| {
            let (a, b) = (h[i], h[(i + 1) % h.len()]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            let v = [dy / len, -dx / len];
            (v, v[0] * a[0] + v[1] * a[1])
        })
        .collect()
}
