//! Solutions `u(y,z)`: closed forms, lifted ODE solutions, and sampled grids.

use std::fmt;

use rayon::prelude::*;

use super::{to_f64, DenseSolution, Grid, NumericsError};
use crate::expr::{CompiledExpr, Expr};
use crate::reduction::ReductionData;
use crate::Scalar;

/// A function of two coordinates that can be evaluated anywhere it is defined.
pub trait ScalarField<F: Scalar>: Sync {
    fn value(&self, a: F, b: F) -> Result<F, NumericsError>;
}

/// Closed-form field, `u(y,z)` by default.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    expr: Expr,
    compiled: CompiledExpr,
}

impl ClosedForm {
    pub fn new(e: &Expr) -> Result<Self, NumericsError> {
        Self::in_vars(e, ["y", "z"])
    }

    pub fn in_vars(e: &Expr, vars: [&str; 2]) -> Result<Self, NumericsError> {
        Ok(ClosedForm {
            expr: e.clone(),
            compiled: e.compile(&vars)?,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl<F: Scalar> ScalarField<F> for ClosedForm {
    fn value(&self, a: F, b: F) -> Result<F, NumericsError> {
        Ok(self.compiled.eval(&[a, b])?)
    }
}

/// `u = σ(y,z)·φ(ω(y,z))` with `φ` from the reduced ODE.
#[derive(Clone, Debug)]
pub struct LiftedSolution<F> {
    sigma: CompiledExpr,
    omega: CompiledExpr,
    phi: DenseSolution<F>,
    ansatz: String,
}

impl<F: Scalar> LiftedSolution<F> {
    pub fn new(rd: &ReductionData, phi: DenseSolution<F>) -> Result<Self, NumericsError> {
        Ok(LiftedSolution {
            sigma: rd.sigma.compile(&["y", "z"])?,
            omega: rd.omega.compile(&["y", "z"])?,
            phi,
            ansatz: format!("u = ({})*phi({})", rd.sigma.canonical(), rd.omega.canonical()),
        })
    }

    pub fn phi(&self) -> &DenseSolution<F> {
        &self.phi
    }

    pub fn provenance(&self) -> Provenance {
        let s = self.phi.settings();
        Provenance::Lifted {
            ansatz: self.ansatz.clone(),
            ode: format!(
                "omega0={} phi0={} dphi0={} step={} span=[{}, {}]",
                s.omega0, s.phi0, s.dphi0, s.step, s.span.0, s.span.1
            ),
        }
    }
}

impl<F: Scalar> ScalarField<F> for LiftedSolution<F> {
    fn value(&self, y: F, z: F) -> Result<F, NumericsError> {
        let w = self.omega.eval(&[y, z])?;
        Ok(self.sigma.eval(&[y, z])? * self.phi.eval(w)?)
    }
}

/// Where the values of a [`SolutionField`] came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    ClosedForm(String),
    Lifted { ansatz: String, ode: String },
    Imported,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm(u) => write!(f, "closed form u = {u}"),
            Provenance::Lifted { ansatz, ode } => write!(f, "{ansatz}; ODE {ode}"),
            Provenance::Imported => f.write_str("imported"),
        }
    }
}

/// Values of `u` on the nodes of a grid, row-major in `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionField<F> {
    pub grid: Grid<F>,
    values: Vec<F>,
    pub provenance: Provenance,
}

impl<F: Scalar> SolutionField<F> {
    pub fn from_values(grid: Grid<F>, values: Vec<F>, provenance: Provenance) -> Result<Self, NumericsError> {
        if values.len() != grid.len() {
            return Err(NumericsError::Format(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = (k / grid.nz, k % grid.nz);
            return Err(NumericsError::NonFinite {
                y: to_f64(grid.y_at(i)),
                z: to_f64(grid.z_at(j)),
            });
        }
        Ok(SolutionField { grid, values, provenance })
    }

    /// Evaluates `u` at every node, in parallel.
    pub fn sample<U: ScalarField<F>>(u: &U, grid: Grid<F>, provenance: Provenance) -> Result<Self, NumericsError> {
        let nodes: Vec<(usize, usize)> = grid.indices().collect();
        let values: Result<Vec<F>, NumericsError> = nodes
            .par_iter()
            .map(|&(i, j)| u.value(grid.y_at(i), grid.z_at(j)))
            .collect();
        Self::from_values(grid, values?, provenance)
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.values[i * self.grid.nz + j]
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Largest `|u_ij − v(y_i, z_j)|` over the grid.
    pub fn max_deviation<U: ScalarField<F>>(&self, v: &U) -> Result<F, NumericsError> {
        let mut worst = F::zero();
        for (i, j) in self.grid.indices() {
            let d = (self.get(i, j) - v.value(self.grid.y_at(i), self.grid.z_at(j))?).abs();
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

/// Most offending nodes listed in a span error.
const LISTED_NODES: usize = 10;

/// `u_ij = σ(y_i,z_j)·φ(ω(y_i,z_j))`; nodes whose `ω` leaves the span of `φ`
/// are reported together.
pub fn lift_solution<F: Scalar>(
    rd: &ReductionData,
    phi: &DenseSolution<F>,
    grid: Grid<F>,
) -> Result<SolutionField<F>, NumericsError> {
    let lifted = LiftedSolution::new(rd, phi.clone())?;
    let (lo, hi) = phi.span();
    let mut outside = Vec::new();
    for (i, j) in grid.indices() {
        let w = lifted.omega.eval(&[grid.y_at(i), grid.z_at(j)])?;
        if !(w >= lo && w <= hi) {
            outside.push((i, j));
        }
    }
    if !outside.is_empty() {
        let total = outside.len();
        outside.truncate(LISTED_NODES);
        return Err(NumericsError::SpanExceeded { nodes: outside, total });
    }
    SolutionField::sample(&lifted, grid, lifted.provenance())
}
