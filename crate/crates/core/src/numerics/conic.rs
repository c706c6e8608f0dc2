//! Conic variables `y = (t+x)/2`, `z = (t−x)/2`.
//!
//! With this scaling `u_tt − u_xx = u_yz` exactly, so
//! `f(y,z,u) = F(y+z, y−z, u)` with no constant factor. (The other common
//! choice `y = t+x`, `z = t−x` gives `u_tt − u_xx = 4u_yz`.)

use num_traits::Num;

use super::{NumericsError, ScalarField};
use crate::expr::Expr;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `(t, x) → (y, z)`
    ToConic,
    /// `(y, z) → (t, x)`
    ToPhysical,
}

pub fn to_conic<N: Num + Copy>(t: N, x: N) -> (N, N) {
    let two = N::one() + N::one();
    ((t + x) / two, (t - x) / two)
}

pub fn to_physical<N: Num + Copy>(y: N, z: N) -> (N, N) {
    (y + z, y - z)
}

pub fn conic_transform<N: Num + Copy>(direction: Direction, point: (N, N)) -> (N, N) {
    match direction {
        Direction::ToConic => to_conic(point.0, point.1),
        Direction::ToPhysical => to_physical(point.0, point.1),
    }
}

/// `ToConic` maps `F(t,x,u)` to `f(y,z,u) = F(y+z, y−z, u)`;
/// `ToPhysical` maps `f` back to `F(t,x,u) = f((t+x)/2, (t−x)/2, u)`.
pub fn transform_rhs(direction: Direction, e: &Expr) -> Expr {
    let (y, z, t, x) = (Expr::var("y"), Expr::var("z"), Expr::var("t"), Expr::var("x"));
    let out = match direction {
        Direction::ToConic => e.substitute_all(&[("t", &y + &z), ("x", &y - &z)]),
        Direction::ToPhysical => e.substitute_all(&[("y", (&t + &x) / 2), ("z", (&t - &x) / 2)]),
    };
    out.simplify()
}

/// A conic-variable field viewed as a function of `(t, x)`.
pub struct Transported<'a, U>(pub &'a U);

impl<F: Scalar, U: ScalarField<F>> ScalarField<F> for Transported<'_, U> {
    fn value(&self, t: F, x: F) -> Result<F, NumericsError> {
        let (y, z) = to_conic(t, x);
        self.0.value(y, z)
    }
}
