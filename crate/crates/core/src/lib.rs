//! Exact side of the toric soliton toolkit: lattice polytopes, Duistermaat–Heckman integrals,
//! the extremal vector, toric test configurations and relative D-stability verdicts.

pub mod affine;
pub mod catalog;
pub mod error;
pub mod exec;
pub mod invariants;
pub mod json;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod stability;
pub mod test_config;

pub use affine::Affine;
pub use error::Error;
pub use invariants::{Direction, EtaChoice};
pub use polytope::{Polytope, ReflexivePolytope};
pub use rational::{RationalVec, Q};
pub use test_config::{NAEnergies, PLConcave};
