//! Numerical back end: reduced-ODE integration, lifting to `u(y,z)`,
//! finite-difference residuals and the conic change of variables.

mod conic;
mod field;
mod grid;
mod io;
mod ode;
mod pipeline;
mod residual;

pub use conic::{conic_transform, to_conic, to_physical, transform_rhs, Direction, Transported};
pub use field::{lift_solution, ClosedForm, LiftedSolution, Provenance, ScalarField, SolutionField};
pub use grid::Grid;
pub use io::{read_matrix, write_matrix};
pub use ode::{omega_span, solve_reduced_ode, DenseSolution, OdeSettings};
pub use pipeline::{verify_reduction, Verification, VerifySettings};
pub use residual::{
    mixed_residual, mixed_residual_sampled, wave_residual, ResidualReport, ResidualSettings, ResidualStat,
    SideCondition,
};

use crate::expr::EvalError;
use crate::reduction::ReductionError;

pub const DEFAULT_STENCIL_H: f64 = 1e-3;
pub const DEFAULT_ODE_STEP: f64 = 1e-3;
pub const DEFAULT_PDE_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_SIDE_TOLERANCE: f64 = 1e-5;
/// `|φ|` beyond this aborts the integration.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("grid needs at least 5 nodes per axis, got {0}")]
    GridTooSmall(usize),
    #[error("empty or non-finite range [{0}, {1}]")]
    BadRange(f64, f64),
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("initial point omega0 = {omega0} lies outside the span [{lo}, {hi}]")]
    StartOutsideSpan { omega0: f64, lo: f64, hi: f64 },
    #[error("solution blew up near omega = {omega} (|phi| = {value:e})")]
    BlowUp { omega: f64, value: f64 },
    #[error("omega = {0} lies outside the integrated span")]
    OutOfSpan(f64),
    #[error("{total} grid node(s) have omega outside the ODE span, e.g. {}", list_nodes(.nodes))]
    SpanExceeded { nodes: Vec<(usize, usize)>, total: usize },
    #[error("non-finite value at ({y}, {z})")]
    NonFinite { y: f64, z: f64 },
    #[error("matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

fn list_nodes(nodes: &[(usize, usize)]) -> String {
    nodes.iter().map(|(i, j)| format!("[{i},{j}]")).collect::<Vec<_>>().join(" ")
}

fn to_f64<F: crate::Scalar>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
