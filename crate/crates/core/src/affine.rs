use crate::rational::{dot, fmt_q, qi, zeros, RationalVec, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// `x ↦ ⟨a, x⟩ + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub a: RationalVec,
    pub b: Q,
}

impl Affine {
    pub fn new(a: RationalVec, b: Q) -> Self {
        Self { a, b }
    }

    pub fn constant(n: usize, b: Q) -> Self {
        Self { a: zeros(n), b }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, Q::zero())
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut a = zeros(n);
        a[i] = qi(1);
        Self { a, b: Q::zero() }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.a, x) + &self.b
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let a = crate::rational::to_f64_vec(&self.a);
        a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + crate::rational::to_f64(&self.b)
    }

    pub fn plus(&self, o: &Affine) -> Affine {
        Affine {
            a: crate::rational::add(&self.a, &o.a),
            b: &self.b + &o.b,
        }
    }

    pub fn minus(&self, o: &Affine) -> Affine {
        Affine {
            a: crate::rational::sub(&self.a, &o.a),
            b: &self.b - &o.b,
        }
    }

    pub fn scaled(&self, s: &Q) -> Affine {
        Affine {
            a: crate::rational::scale(&self.a, s),
            b: &self.b * s,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }
}

/// Wire form used by the PL configuration schema: `{"a": ["0","-1"], "b": "0"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineJson {
    pub a: Vec<String>,
    pub b: String,
}

impl From<&Affine> for AffineJson {
    fn from(f: &Affine) -> Self {
        Self {
            a: f.a.iter().map(fmt_q).collect(),
            b: fmt_q(&f.b),
        }
    }
}

impl TryFrom<&AffineJson> for Affine {
    type Error = crate::rational::ParseRationalError;
    fn try_from(j: &AffineJson) -> Result<Self, Self::Error> {
        let a =
            j.a.iter()
                .map(|s| crate::rational::parse_q(s))
                .collect::<Result<Vec<_>, _>>()?;
        Ok(Affine::new(a, crate::rational::parse_q(&j.b)?))
    }
}
