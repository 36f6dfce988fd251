//! Uniform tensor grids in log coordinates.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    /// Nodes per axis.
    pub n: usize,
    pub lo: Vec<f64>,
    pub h: Vec<f64>,
}

impl Grid {
    /// The box [-r, r]^dim with `n` nodes per axis.
    pub fn centered(dim: usize, n: usize, r: f64) -> Self {
        Self::boxed(&vec![-r; dim], &vec![r; dim], n)
    }

    pub fn boxed(lo: &[f64], hi: &[f64], n: usize) -> Self {
        assert!(n >= 3, "need at least three nodes per axis");
        assert!(lo.len() == hi.len() && (1..=2).contains(&lo.len()));
        let h = lo.iter().zip(hi).map(|(a, b)| (b - a) / (n - 1) as f64).collect();
        Self {
            dim: lo.len(),
            n,
            lo: lo.to_vec(),
            h,
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.lo[axis] + self.h[axis] * (self.n - 1) as f64
    }

    /// Axis indices of a flat node index; axis 0 varies fastest.
    #[inline]
    pub fn split(&self, k: usize) -> [usize; 2] {
        if self.dim == 1 {
            [k, 0]
        } else {
            [k % self.n, k / self.n]
        }
    }

    #[inline]
    pub fn index(&self, i: [usize; 2]) -> usize {
        i[0] + self.n * i[1]
    }

    #[inline]
    pub fn coord(&self, k: usize) -> [f64; 2] {
        let i = self.split(k);
        let mut y = [0.0; 2];
        for a in 0..self.dim {
            y[a] = self.lo[a] + self.h[a] * i[a] as f64;
        }
        y
    }

    /// Neighbour index with mirror reflection at the box faces.
    #[inline]
    pub fn reflect(&self, i: isize) -> usize {
        let last = self.n as isize - 1;
        let j = if i < 0 {
            -i
        } else if i > last {
            2 * last - i
        } else {
            i
        };
        j as usize
    }

    /// Trapezoid weight of a node.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        let i = self.split(k);
        let mut w = 1.0;
        for a in 0..self.dim {
            let end = i[a] == 0 || i[a] == self.n - 1;
            w *= if end { 0.5 * self.h[a] } else { self.h[a] };
        }
        w
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weight(k)).collect()
    }

    pub fn on_boundary(&self, k: usize) -> bool {
        let i = self.split(k);
        (0..self.dim).any(|a| i[a] == 0 || i[a] == self.n - 1)
    }

    /// Bilinear interpolation of nodal values, clamped to the box.
    pub fn interpolate(&self, values: &[f64], y: [f64; 2]) -> f64 {
        let mut base = [0usize; 2];
        let mut frac = [0.0; 2];
        for a in 0..self.dim {
            let t = ((y[a] - self.lo[a]) / self.h[a]).clamp(0.0, (self.n - 1) as f64);
            let i = (t.floor() as usize).min(self.n - 2);
            base[a] = i;
            frac[a] = t - i as f64;
        }
        if self.dim == 1 {
            let (i, f) = (base[0], frac[0]);
            return values[i] * (1.0 - f) + values[i + 1] * f;
        }
        let at = |di: usize, dj: usize| values[self.index([base[0] + di, base[1] + dj])];
        let (fx, fy) = (frac[0], frac[1]);
        at(0, 0) * (1.0 - fx) * (1.0 - fy)
            + at(1, 0) * fx * (1.0 - fy)
            + at(0, 1) * (1.0 - fx) * fy
            + at(1, 1) * fx * fy
    }
}
