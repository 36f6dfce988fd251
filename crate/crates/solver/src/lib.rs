//! Finite-difference potentials on tensor grids in log coordinates (dimension 1 or 2): Ricci
//! potentials, energy functionals, the weighted inverse Monge–Ampère flow and slope checks
//! against the exact values of `torus-soliton-core`.

pub mod ansatz;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod grid;
pub mod io;
pub mod newton;
pub mod potential;
pub mod ricci;
pub mod slope;

pub use ansatz::Ansatz;
pub use error::SolverError;
pub use flow::{flow_run, FlowOptions, FlowRun};
pub use functionals::{calabi_bound, functionals, Diagnostics, Evaluator, Weight};
pub use grid::Grid;
pub use potential::ConvexPotential;
pub use ricci::ricci_potential;
pub use slope::{slope_check, SlopeOptions, SlopeRow};
