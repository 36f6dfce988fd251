//! Exact two-phase simplex over the rationals with Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use crate::rational::{zeros, RationalVec, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Minimize `⟨objective, x⟩`.
    pub objective: RationalVec,
    pub constraints: Vec<(RationalVec, Relation, Q)>,
    /// `free[j]`: variable `j` is unrestricted in sign, otherwise `x_j ≥ 0`.
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: RationalVec, value: Q },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: RationalVec) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            free: vec![false; n],
        }
    }

    pub fn with_free(mut self, j: usize) -> Self {
        self.free[j] = true;
        self
    }

    pub fn push(&mut self, row: RationalVec, rel: Relation, rhs: Q) {
        debug_assert_eq!(row.len(), self.objective.len());
        self.constraints.push((row, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.objective.len();
        // column map: original j -> (plus column, optional minus column)
        let mut cols = Vec::with_capacity(n);
        let mut ncols = 0;
        for j in 0..n {
            let p = ncols;
            ncols += 1;
            let m = if self.free[j] {
                ncols += 1;
                Some(p + 1)
            } else {
                None
            };
            cols.push((p, m));
        }
        let nstruct = ncols;
        let m = self.constraints.len();
        let mut rows: Vec<RationalVec> = Vec::with_capacity(m);
        let mut rhs: RationalVec = Vec::with_capacity(m);
        let mut rels = Vec::with_capacity(m);
        for (a, rel, b) in &self.constraints {
            let mut r = zeros(nstruct);
            for j in 0..n {
                let (p, mm) = cols[j];
                r[p] = a[j].clone();
                if let Some(mm) = mm {
                    r[mm] = -&a[j];
                }
            }
            let (r, rel, b) = if b.is_negative() {
                let flip = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (r.into_iter().map(|x| -x).collect(), flip, -b)
            } else {
                (r, *rel, b.clone())
            };
            rows.push(r);
            rhs.push(b);
            rels.push(rel);
        }
        let nslack = rels.iter().filter(|r| **r != Relation::Eq).count();
        let nart = rels.iter().filter(|r| **r != Relation::Le).count();
        let width = nstruct + nslack + nart;
        let mut t = Tableau {
            a: vec![zeros(width + 1); m],
            basis: vec![0; m],
            width,
        };
        let mut s = nstruct;
        let mut art = nstruct + nslack;
        let art_start = art;
        for i in 0..m {
            t.a[i][..nstruct].clone_from_slice(&rows[i]);
            t.a[i][width] = rhs[i].clone();
            match rels[i] {
                Relation::Le => {
                    t.a[i][s] = Q::one();
                    t.basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    t.a[i][s] = -Q::one();
                    s += 1;
                    t.a[i][art] = Q::one();
                    t.basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t.a[i][art] = Q::one();
                    t.basis[i] = art;
                    art += 1;
                }
            }
        }

        if nart > 0 {
            let mut c1 = zeros(width);
            for c in c1.iter_mut().skip(art_start) {
                *c = Q::one();
            }
            if t.run(&c1, width).is_err() {
                unreachable!("phase one is bounded below by zero");
            }
            if !t.objective_value(&c1).is_zero() {
                return LpOutcome::Infeasible;
            }
            // pivot remaining zero-level artificials out of the basis, dropping redundant rows
            let mut i = 0;
            while i < t.a.len() {
                if t.basis[i] >= art_start {
                    match (0..art_start).find(|&j| !t.a[i][j].is_zero()) {
                        Some(j) => {
                            t.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            t.a.remove(i);
                            t.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut c2 = zeros(width);
        for j in 0..n {
            let (p, mm) = cols[j];
            c2[p] = self.objective[j].clone();
            if let Some(mm) = mm {
                c2[mm] = -&self.objective[j];
            }
        }
        if t.run(&c2, art_start).is_err() {
            return LpOutcome::Unbounded;
        }
        let mut y = zeros(width);
        for (i, &b) in t.basis.iter().enumerate() {
            y[b] = t.a[i][width].clone();
        }
        let x: RationalVec = (0..n)
            .map(|j| {
                let (p, mm) = cols[j];
                match mm {
                    Some(mm) => &y[p] - &y[mm],
                    None => y[p].clone(),
                }
            })
            .collect();
        let value = x.iter().zip(&self.objective).fold(Q::zero(), |acc, (a, b)| acc + a * b);
        LpOutcome::Optimal { x, value }
    }
}

struct Tableau {
    a: Vec<RationalVec>,
    basis: Vec<usize>,
    width: usize,
}

struct Unbounded;

impl Tableau {
    fn objective_value(&self, c: &[Q]) -> Q {
        self.basis
            .iter()
            .enumerate()
            .fold(Q::zero(), |acc, (i, &b)| acc + &c[b] * &self.a[i][self.width])
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v /= &piv;
        }
        let prow = self.a[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (v, p) in self.a[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimize `c` using only columns `< allowed`; Bland's rule for entering and leaving.
    fn run(&mut self, c: &[Q], allowed: usize) -> Result<(), Unbounded> {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = c[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.a[i][j].is_zero() {
                        red -= &c[b] * &self.a[i][j];
                    }
                }
                if red.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][j].is_positive() {
                    continue;
                }
                let ratio = &self.a[i][self.width] / &self.a[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Err(Unbounded);
            };
            self.pivot(r, j);
        }
    }
}
