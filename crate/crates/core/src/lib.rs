//! Q-conditional symmetries of the nonlinear wave equation `u_yz = f(y,z,u)`.
//!
//! * [`expr`]: a small computer-algebra core (parse, differentiate,
//!   simplify, evaluate, sampling-based zero tests).
//! * [`detsys`]: operator normalization and determining-equation residuals.
//! * [`reduction`]: the generating-function construction of reducible
//!   right-hand sides, invariants, multipliers and the reduced ODE.
//! * [`numerics`]: ODE solver, lifting, finite-difference residuals and the
//!   conic change of variables.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the usual `f64` instantiation.

pub mod detsys;
pub mod expr;
pub mod numerics;
pub mod reduction;
pub mod report;
mod scalar;

pub use expr::{is_zero, parse, Expr, SamplingSpec};
pub use scalar::Scalar;

/// Exact rational used for literals and exact coordinate transforms.
pub type Rational = num_rational::Rational64;

pub type Grid64 = numerics::Grid<f64>;
pub type DenseSolution64 = numerics::DenseSolution<f64>;
pub type SolutionField64 = numerics::SolutionField<f64>;
pub type ResidualReport64 = numerics::ResidualReport<f64>;
