//! Solve, lift and check in one call.

use super::{
    lift_solution, mixed_residual, omega_span, solve_reduced_ode, Grid, LiftedSolution, NumericsError, OdeSettings,
    ResidualReport, ResidualSettings, SideCondition, SolutionField, DEFAULT_ODE_STEP,
};
use crate::reduction::ReductionData;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifySettings<F> {
    pub grid: Grid<F>,
    pub omega0: F,
    pub phi0: F,
    pub dphi0: F,
    pub step: F,
    pub residual: ResidualSettings<F>,
}

impl<F: Scalar> VerifySettings<F> {
    pub fn new(grid: Grid<F>, omega0: F, phi0: F, dphi0: F) -> Self {
        VerifySettings {
            grid,
            omega0,
            phi0,
            dphi0,
            step: F::lit(DEFAULT_ODE_STEP),
            residual: ResidualSettings::default(),
        }
    }
}

pub struct Verification<F> {
    pub solution: LiftedSolution<F>,
    pub field: SolutionField<F>,
    pub report: ResidualReport<F>,
}

/// Integrates `φ'' = −Φ` over the range of `ω` on the grid (plus stencil
/// reach), lifts it, and checks `u_yz = f` and `u_y + k·u_z = s·u`.
pub fn verify_reduction<F: Scalar>(rd: &ReductionData, s: &VerifySettings<F>) -> Result<Verification<F>, NumericsError> {
    let ode = rd.reduced_ode()?;
    let span = omega_span(&rd.omega, &s.grid, s.residual.h, s.omega0)?;
    let settings = OdeSettings {
        omega0: s.omega0,
        phi0: s.phi0,
        dphi0: s.dphi0,
        step: s.step,
        span,
    };
    let phi = solve_reduced_ode(&ode, &settings)?;
    let field = lift_solution(rd, &phi, s.grid)?;
    let solution = LiftedSolution::new(rd, phi)?;
    let (k, l) = rd.operator();
    let side = SideCondition::new(&k, &l)?;
    let report = mixed_residual(&solution, &rd.f, &s.grid, &s.residual, Some(&side))?;
    Ok(Verification { solution, field, report })
}
