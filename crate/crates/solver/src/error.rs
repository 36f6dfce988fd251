use thiserror::Error;

use crate::flow::FlowRun;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("degenerate Hessian at node {node} (det = {det:e})")]
    DegenerateHessian { node: usize, det: f64 },
    #[error("flow did not converge after {} steps (residual {:e})", .0.trace.len(), .0.residual)]
    NotConverged(Box<FlowRun>),
    #[error("non-finite integrand in {0}")]
    QuadratureFailure(&'static str),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] torus_soliton_core::Error),
}
