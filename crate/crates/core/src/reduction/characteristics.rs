//! Numerical invariant: labels points by following the characteristic
//! `dz/dy = k(y,z)` to the reference line `y = reference_y`.

use rayon::prelude::*;

use super::ReductionError;
use crate::expr::{CompiledExpr, Expr};
use crate::Scalar;

pub const DEFAULT_CHARACTERISTIC_STEP: f64 = 1e-3;
pub const DEFAULT_REFERENCE_Y: f64 = 1.0;

/// Closed axis-aligned box in the (y, z) plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl Bounds {
    pub fn square(lo: f64, hi: f64) -> Self {
        Bounds {
            y: (lo, hi),
            z: (lo, hi),
        }
    }

    pub fn contains(&self, y: f64, z: f64) -> bool {
        y >= self.y.0 && y <= self.y.1 && z >= self.z.0 && z <= self.z.1
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::square(0.5, 2.0)
    }
}

#[derive(Clone, Debug)]
pub struct NumericInvariant {
    k: CompiledExpr,
    k_expr: Expr,
    reference_y: f64,
    bounds: Bounds,
    step: f64,
    /// Optional reparameterization of the reference line, as a function of `z`.
    section: Option<(CompiledExpr, Expr)>,
}

impl NumericInvariant {
    /// `k` must depend on `y` and `z` only.
    pub fn new(k: &Expr, reference_y: f64, bounds: Bounds, step: f64) -> Result<Self, ReductionError> {
        if !(step > 0.0) {
            return Err(ReductionError::BadSettings("characteristic step must be positive"));
        }
        if !(bounds.y.0 <= reference_y && reference_y <= bounds.y.1) {
            return Err(ReductionError::BadSettings("reference line lies outside the box"));
        }
        let compiled = k.compile(&["y", "z"])?;
        Ok(NumericInvariant {
            k: compiled,
            k_expr: k.clone(),
            reference_y,
            bounds,
            step,
            section: None,
        })
    }

    /// Reports labels as `section(z_ref)` instead of the raw crossing value.
    pub fn with_section(mut self, section: &Expr) -> Result<Self, ReductionError> {
        let compiled = section.compile(&["z"])?;
        self.section = Some((compiled, section.clone()));
        Ok(self)
    }

    pub fn slope(&self) -> &Expr {
        &self.k_expr
    }

    pub fn reference_y(&self) -> f64 {
        self.reference_y
    }

    pub fn section(&self) -> Option<&Expr> {
        self.section.as_ref().map(|(_, e)| e)
    }

    /// `z` where the characteristic through `(y, z)` meets `y = reference_y`.
    pub fn crossing<F: Scalar>(&self, y: F, z: F) -> Result<F, ReductionError> {
        let (y0, z0) = (y.to_f64().unwrap_or(f64::NAN), z.to_f64().unwrap_or(f64::NAN));
        if !self.bounds.contains(y0, z0) {
            return Err(ReductionError::CharacteristicEscape { start: (y0, z0), at: (y0, z0) });
        }
        let target = F::lit(self.reference_y);
        let span = target - y;
        let n = (span.abs() / F::lit(self.step)).ceil().to_usize().unwrap_or(0);
        if n == 0 {
            return Ok(z);
        }
        let h = span / F::from_usize(n).unwrap_or_else(F::one);
        let half = F::lit(0.5);
        let two = F::lit(2.0);
        let six = F::lit(6.0);
        let slope = |yy: F, zz: F| -> Result<F, ReductionError> {
            let (yf, zf) = (yy.to_f64().unwrap_or(f64::NAN), zz.to_f64().unwrap_or(f64::NAN));
            if !self.bounds.contains(yf, zf) {
                return Err(ReductionError::CharacteristicEscape { start: (y0, z0), at: (yf, zf) });
            }
            Ok(self.k.eval(&[yy, zz])?)
        };
        // y + n·h can overshoot the box edge by an ulp, so the last node is pinned
        let node = |i: usize| if i == n { target } else { y + h * F::from_usize(i).unwrap_or_else(F::one) };
        let mut zz = z;
        for i in 0..n {
            let (yy, next) = (node(i), node(i + 1));
            let mid = yy + half * h;
            let k1 = slope(yy, zz)?;
            let k2 = slope(mid, zz + half * h * k1)?;
            let k3 = slope(mid, zz + half * h * k2)?;
            let k4 = slope(next, zz + h * k3)?;
            zz = zz + h / six * (k1 + two * k2 + two * k3 + k4);
        }
        let zf = zz.to_f64().unwrap_or(f64::NAN);
        if !self.bounds.contains(self.reference_y, zf) {
            return Err(ReductionError::CharacteristicEscape { start: (y0, z0), at: (self.reference_y, zf) });
        }
        Ok(zz)
    }

    /// Invariant label of `(y, z)`.
    pub fn label<F: Scalar>(&self, y: F, z: F) -> Result<F, ReductionError> {
        let zr = self.crossing(y, z)?;
        match &self.section {
            Some((c, _)) => Ok(c.eval(&[zr])?),
            None => Ok(zr),
        }
    }

    /// Labels every point, in parallel.
    pub fn label_all<F: Scalar>(&self, points: &[(F, F)]) -> Vec<Result<F, ReductionError>> {
        points.par_iter().map(|&(y, z)| self.label(y, z)).collect()
    }
}
