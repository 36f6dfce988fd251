//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type RationalVec = Vec<Q>;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

pub fn qvec(xs: &[i64]) -> RationalVec {
    xs.iter().map(|&x| qi(x)).collect()
}

pub fn zeros(n: usize) -> RationalVec {
    vec![Q::zero(); n]
}

pub fn unit(n: usize, i: usize) -> RationalVec {
    let mut v = zeros(n);
    v[i] = Q::one();
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> RationalVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> RationalVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Q], s: &Q) -> RationalVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Q]) -> RationalVec {
    a.iter().map(|x| -x).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerators: divide in floating point after shifting
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn to_f64_vec(a: &[Q]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

pub fn is_integer_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_integer())
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scale a nonzero rational vector to the primitive integer vector on the same ray.
pub fn primitive(a: &[Q]) -> Vec<BigInt> {
    let l = lcm_denominators(a);
    let ints: Vec<BigInt> = a
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    assert!(!g.is_zero(), "primitive() of the zero vector");
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn from_ints(a: &[BigInt]) -> RationalVec {
    a.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Render as `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational {0:?}")]
pub struct ParseRationalError(pub String);

pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Q::new(p, q))
        }
        None => {
            if let Ok(p) = t.parse::<BigInt>() {
                return Ok(Q::from_integer(p));
            }
            // finite decimals are accepted and converted exactly
            let (int, frac) = t.split_once('.').ok_or_else(err)?;
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let n: BigInt = digits.parse().map_err(|_| err())?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            let v = Q::new(n, d);
            Ok(if neg { -v } else { v })
        }
    }
}

pub fn floor_to_i128(x: &Q) -> i128 {
    x.floor().to_integer().to_i128().expect("floor overflows i128")
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Exact determinant by Gaussian elimination over Q.
pub fn det(mut m: Vec<RationalVec>) -> Q {
    let n = m.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    d
}

/// Solve `a x = b` exactly; `None` when singular.
pub fn solve(mut a: Vec<RationalVec>, mut b: RationalVec) -> Option<RationalVec> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        b.swap(p, c);
        let piv = a[c][c].clone();
        for k in c..n {
            a[c][k] /= &piv;
        }
        b[c] /= &piv;
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
            let t = &f * &b[c];
            b[r] -= t;
        }
    }
    Some(b)
}

/// Rank of a rational matrix given by rows.
pub fn rank(mut m: Vec<RationalVec>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let piv = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for k in c..cols {
                let t = &f * &m[r][k];
                m[i][k] -= t;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// A nonzero vector orthogonal to the `n-1` given rows in `Q^n` (generalized cross product).
pub fn normal_of(rows: &[RationalVec], n: usize) -> RationalVec {
    debug_assert_eq!(rows.len() + 1, n);
    (0..n)
        .map(|i| {
            let minor: Vec<RationalVec> = rows
                .iter()
                .map(|r| (0..n).filter(|&j| j != i).map(|j| r[j].clone()).collect())
                .collect();
            let d = if minor.is_empty() { Q::one() } else { det(minor) };
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
