//! Strategies and property bodies shared by the property suite and the acceptance run.

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use torus_soliton_core::affine::Affine;
use torus_soliton_core::catalog;
use torus_soliton_core::invariants::{self, Direction};
use torus_soliton_core::polytope::Polytope;
use torus_soliton_core::rational::{add, qf, qi, Q};
use torus_soliton_core::test_config::{self, JtMode, PLConcave};

type Outcome = Result<(), TestCaseError>;

pub fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| qf(p, q))
}

pub fn surface() -> impl Strategy<Value = Polytope> {
    (0..catalog::NAMES.len()).prop_map(|i| catalog::polytope(catalog::NAMES[i]).unwrap())
}

pub fn direction(n: usize) -> impl Strategy<Value = Direction> {
    (prop::collection::vec(rational(), n), rational()).prop_map(|(mu, c)| Direction::new(mu, c))
}

/// `min(0, creases)` with up to three pieces of small slope.
pub fn config(p: &Polytope) -> impl Strategy<Value = PLConcave> {
    let n = p.dim();
    let p = p.clone();
    prop::collection::vec((prop::collection::vec(-2i64..=2, n), rational()), 1..=3).prop_map(move |data| {
        let pieces: Vec<Affine> = data
            .into_iter()
            .map(|(a, b)| Affine::new(a.into_iter().map(qi).collect(), b))
            .collect();
        PLConcave::from_creases(&p, &pieces, true)
    })
}

pub fn with_config() -> impl Strategy<Value = (Polytope, PLConcave)> {
    surface().prop_flat_map(|p| {
        let g = config(&p);
        (Just(p), g)
    })
}

pub fn gram_is_positive_definite(p: Polytope, x: Vec<i64>) -> Outcome {
    let n = p.dim();
    let x: Vec<Q> = x[..=n].iter().map(|&v| qi(v)).collect();
    prop_assume!(x.iter().any(|v| !v.is_zero()));
    let g = invariants::gram(&p);
    prop_assert!(invariants::gram_form(&g, &x, &x).is_positive());
    Ok(())
}

pub fn twists_add(p: Polytope, g: PLConcave, seed: Vec<(Q, Q)>) -> Outcome {
    let n = p.dim();
    let mu = Direction::new(seed[..n].iter().map(|s| s.0.clone()).collect(), seed[2].1.clone());
    let nu = Direction::new(seed[..n].iter().map(|s| s.1.clone()).collect(), seed[2].0.clone());
    let eta = invariants::extremal(&p).unwrap();
    let twisted = g.twist(&mu);
    prop_assert_eq!(
        twisted.twist(&nu),
        g.twist(&Direction::new(add(&mu.mu, &nu.mu), &mu.c + &nu.c))
    );
    let a = test_config::na_energies(&p, &g, &eta).unwrap();
    let b = test_config::na_energies(&p, &twisted, &eta).unwrap();
    let m = test_config::na_energies(&p, &PLConcave::product(&mu), &eta).unwrap();
    prop_assert_eq!(&b.e_na, &(&a.e_na + &m.e_na));
    prop_assert_eq!(&b.e_eta_na, &(&a.e_eta_na + &m.e_eta_na));
    prop_assert_eq!(&b.l_na, &(&a.l_na + &m.l_na));
    Ok(())
}

pub fn d_eta_is_translation_equivariant(p: Polytope, g: PLConcave, eta_seed: Direction, mu_seed: Direction) -> Outcome {
    let n = p.dim();
    let eta = Direction::new(eta_seed.mu[..n].to_vec(), eta_seed.c.clone());
    let mu = Direction::new(mu_seed.mu[..n].to_vec(), mu_seed.c.clone());
    let a = test_config::na_energies(&p, &g, &eta).unwrap().d_eta_na;
    let b = test_config::na_energies(&p, &g.twist(&mu), &eta).unwrap().d_eta_na;
    // the linear part of the twist moves D_eta by F(mu) - <mu, eta>, the constant by -c <1, eta>
    let linear = Direction::new(mu.mu.clone(), Q::zero());
    let expect = invariants::futaki(&p, &linear).unwrap()
        - invariants::pairing(&p, &linear, &eta)
        - &mu.c * invariants::pairing(&p, &Direction::identity(n), &eta);
    prop_assert_eq!(&b - &a, expect);
    // for the extremal vector every twist is invisible
    let ext = invariants::extremal(&p).unwrap();
    let a = test_config::na_energies(&p, &g, &ext).unwrap().d_eta_na;
    let b = test_config::na_energies(&p, &g.twist(&mu), &ext).unwrap().d_eta_na;
    prop_assert_eq!(a, b);
    Ok(())
}

pub fn j_eta_is_nonnegative_when_m_x_is_positive(p: Polytope, g: PLConcave, seed: Direction) -> Outcome {
    let n = p.dim();
    let eta = invariants::centred(&p, seed.mu[..n].iter().map(|x| x / qi(4)).collect());
    prop_assume!(invariants::m_x(&p, &eta).is_positive());
    let e = test_config::na_energies(&p, &g, &eta).unwrap();
    prop_assert!(!e.j_eta_na.is_negative());
    prop_assert!(!e.j_na.is_negative());
    Ok(())
}

pub fn jt_min_certificates_verify(p: Polytope, g: PLConcave, eta_mode: bool) -> Outcome {
    let eta = invariants::extremal(&p).unwrap();
    let mode = if eta_mode { JtMode::Eta } else { JtMode::Plain };
    let jt = test_config::jt_min(&p, &g, &eta, mode).unwrap();
    let sub = g.subdivision(&p).unwrap();
    prop_assert!(test_config::verify_certificate(&sub, &g, &jt));
    prop_assert!(!jt.value.is_negative());
    Ok(())
}
