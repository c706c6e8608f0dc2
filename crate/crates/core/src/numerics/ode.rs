//! Fixed-step RK4 for `φ'' = rhs(ω, φ)` with cubic Hermite dense output.

use super::{to_f64, Grid, NumericsError, BLOW_UP_THRESHOLD};
use crate::reduction::ReducedOde;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeSettings<F> {
    pub omega0: F,
    pub phi0: F,
    pub dphi0: F,
    pub step: F,
    /// Integration interval; must contain `omega0`.
    pub span: (F, F),
}

/// Nodes `(ω_i, φ_i, φ'_i)` in increasing `ω`, interpolated by cubic Hermite.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSolution<F> {
    settings: OdeSettings<F>,
    omega: Vec<F>,
    phi: Vec<F>,
    dphi: Vec<F>,
}

impl<F: Scalar> DenseSolution<F> {
    pub fn span(&self) -> (F, F) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    pub fn settings(&self) -> &OdeSettings<F> {
        &self.settings
    }

    pub fn nodes(&self) -> usize {
        self.omega.len()
    }

    fn locate(&self, w: F) -> Result<usize, NumericsError> {
        let (lo, hi) = self.span();
        if !(w >= lo && w <= hi) {
            return Err(NumericsError::OutOfSpan(to_f64(w)));
        }
        let i = self.omega.partition_point(|&x| x <= w);
        Ok(i.saturating_sub(1).min(self.omega.len().saturating_sub(2)))
    }

    /// `(φ(ω), φ'(ω))`.
    pub fn eval_with_derivative(&self, w: F) -> Result<(F, F), NumericsError> {
        if self.omega.len() == 1 {
            return if w == self.omega[0] {
                Ok((self.phi[0], self.dphi[0]))
            } else {
                Err(NumericsError::OutOfSpan(to_f64(w)))
            };
        }
        let i = self.locate(w)?;
        let h = self.omega[i + 1] - self.omega[i];
        let s = (w - self.omega[i]) / h;
        let (one, two, three, six) = (F::one(), F::lit(2.0), F::lit(3.0), F::lit(6.0));
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        let (p0, p1) = (self.phi[i], self.phi[i + 1]);
        let (m0, m1) = (self.dphi[i] * h, self.dphi[i + 1] * h);
        let value = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
        let d = (six * s2 - six * s) * p0
            + (three * s2 - F::lit(4.0) * s + one) * m0
            + (six * s - six * s2) * p1
            + (three * s2 - two * s) * m1;
        Ok((value, d / h))
    }

    pub fn eval(&self, w: F) -> Result<F, NumericsError> {
        Ok(self.eval_with_derivative(w)?.0)
    }
}

/// Integrates from `omega0` to both ends of the span with equal steps no
/// longer than `step`, so each end is hit exactly.
pub fn solve_reduced_ode<F: Scalar>(ode: &ReducedOde, settings: &OdeSettings<F>) -> Result<DenseSolution<F>, NumericsError> {
    let OdeSettings { omega0, phi0, dphi0, step, span } = *settings;
    if !(step > F::zero()) || !step.is_finite() {
        return Err(NumericsError::BadStep(to_f64(step)));
    }
    if !(span.0 <= omega0 && omega0 <= span.1) {
        return Err(NumericsError::StartOutsideSpan {
            omega0: to_f64(omega0),
            lo: to_f64(span.0),
            hi: to_f64(span.1),
        });
    }
    let backward = integrate(ode, omega0, phi0, dphi0, span.0, step)?;
    let forward = integrate(ode, omega0, phi0, dphi0, span.1, step)?;
    let mut sol = DenseSolution {
        settings: *settings,
        omega: Vec::with_capacity(backward.len() + forward.len()),
        phi: Vec::new(),
        dphi: Vec::new(),
    };
    for &(w, p, d) in backward.iter().rev().chain(forward.iter().skip(1)) {
        sol.omega.push(w);
        sol.phi.push(p);
        sol.dphi.push(d);
    }
    Ok(sol)
}

fn integrate<F: Scalar>(ode: &ReducedOde, w0: F, p0: F, d0: F, end: F, step: F) -> Result<Vec<(F, F, F)>, NumericsError> {
    let span = end - w0;
    let n = (span.abs() / step).ceil().to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(n + 1);
    out.push((w0, p0, d0));
    if n == 0 {
        return Ok(out);
    }
    let h = span / F::from_usize(n).unwrap_or_else(F::one);
    let (half, two, six) = (F::lit(0.5), F::lit(2.0), F::lit(6.0));
    let limit = F::lit(BLOW_UP_THRESHOLD);
    let (mut p, mut d) = (p0, d0);
    for i in 0..n {
        let w = w0 + h * F::from_usize(i).unwrap_or_else(F::zero);
        let a1 = ode.eval(w, p)?;
        let (p2, d2) = (p + half * h * d, d + half * h * a1);
        let a2 = ode.eval(w + half * h, p2)?;
        let (p3, d3) = (p + half * h * d2, d + half * h * a2);
        let a3 = ode.eval(w + half * h, p3)?;
        let (p4, d4) = (p + h * d3, d + h * a3);
        let a4 = ode.eval(w + h, p4)?;
        p = p + h / six * (d + two * d2 + two * d3 + d4);
        d = d + h / six * (a1 + two * a2 + two * a3 + a4);
        let w_next = if i + 1 == n { end } else { w0 + h * F::from_usize(i + 1).unwrap_or_else(F::one) };
        if !(p.abs() <= limit) || !d.is_finite() {
            return Err(NumericsError::BlowUp {
                omega: to_f64(w_next),
                value: to_f64(p.abs()),
            });
        }
        out.push((w_next, p, d));
    }
    Ok(out)
}

/// Range of `omega` over the grid widened by `pad` on every side (the
/// stencil reach), together with `omega0`.
pub fn omega_span<F: Scalar>(
    omega: &crate::expr::Expr,
    grid: &Grid<F>,
    pad: F,
    omega0: F,
) -> Result<(F, F), NumericsError> {
    let c = omega.compile(&["y", "z"])?;
    let (mut lo, mut hi) = (omega0, omega0);
    for (i, j) in grid.indices() {
        let offsets = [-pad, F::zero(), pad];
        for dy in offsets {
            for dz in offsets {
                let w = c.eval(&[grid.y_at(i) + dy, grid.z_at(j) + dz])?;
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
    }
    let margin = (hi - lo) * F::lit(1e-9) + F::epsilon();
    Ok((lo - margin, hi + margin))
}
