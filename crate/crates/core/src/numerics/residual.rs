//! Finite-difference residuals of `u_yz = f`, of the side condition
//! `u_y + K·u_z = L`, and of `u_tt − u_xx = F`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    to_f64, Grid, NumericsError, ScalarField, SolutionField, DEFAULT_PDE_TOLERANCE, DEFAULT_SIDE_TOLERANCE,
    DEFAULT_STENCIL_H,
};
use crate::expr::{CompiledExpr, Expr};
use crate::report::Check;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSettings<F> {
    /// Stencil spacing for evaluable fields; sampled fields use the grid spacing.
    pub h: F,
    pub pde_tolerance: F,
    pub side_tolerance: F,
}

impl<F: Scalar> Default for ResidualSettings<F> {
    fn default() -> Self {
        ResidualSettings {
            h: F::lit(DEFAULT_STENCIL_H),
            pde_tolerance: F::lit(DEFAULT_PDE_TOLERANCE),
            side_tolerance: F::lit(DEFAULT_SIDE_TOLERANCE),
        }
    }
}

/// `u_y + K·u_z = L` with `K`, `L` functions of `(y, z, u)`.
#[derive(Clone, Debug)]
pub struct SideCondition {
    pub k: Expr,
    pub l: Expr,
    k_c: CompiledExpr,
    l_c: CompiledExpr,
}

impl SideCondition {
    pub fn new(k: &Expr, l: &Expr) -> Result<Self, NumericsError> {
        Ok(SideCondition {
            k: k.clone(),
            l: l.clone(),
            k_c: k.compile(&["y", "z", "u"])?,
            l_c: l.compile(&["y", "z", "u"])?,
        })
    }

    fn residual<F: Scalar>(&self, y: F, z: F, u: F, uy: F, uz: F) -> Result<F, NumericsError> {
        let k = self.k_c.eval(&[y, z, u])?;
        let l = self.l_c.eval(&[y, z, u])?;
        Ok((uy + k * uz - l).abs())
    }
}

/// Maximum of one residual over the scanned nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualStat<F> {
    pub name: &'static str,
    pub max_abs: F,
    pub tolerance: F,
    /// Coordinates of the node attaining the maximum.
    pub witness: (F, F),
}

impl<F: Scalar> ResidualStat<F> {
    pub fn passed(&self) -> bool {
        self.max_abs <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport<F> {
    pub pde: ResidualStat<F>,
    pub side: Option<ResidualStat<F>>,
    /// Nodes at which the residuals were evaluated.
    pub nodes: usize,
    pub h: F,
    pub coords: [&'static str; 2],
}

impl<F: Scalar> ResidualReport<F> {
    pub fn passed(&self) -> bool {
        self.pde.passed() && self.side.as_ref().is_none_or(ResidualStat::passed)
    }

    pub fn checks(&self) -> Vec<Check> {
        std::iter::once(&self.pde)
            .chain(self.side.as_ref())
            .map(|s| {
                let point: BTreeMap<String, f64> = [
                    (self.coords[0].to_string(), to_f64(s.witness.0)),
                    (self.coords[1].to_string(), to_f64(s.witness.1)),
                ]
                .into_iter()
                .collect();
                Check::bounded(s.name, to_f64(s.max_abs), to_f64(s.tolerance), Some(point))
            })
            .collect()
    }
}

struct NodeResidual<F> {
    at: (F, F),
    pde: F,
    side: Option<F>,
}

fn finite<F: Scalar>(v: F, at: (F, F)) -> Result<F, NumericsError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite {
            y: to_f64(at.0),
            z: to_f64(at.1),
        })
    }
}

fn summarize<F: Scalar>(
    rows: Vec<NodeResidual<F>>,
    settings: &ResidualSettings<F>,
    h: F,
    pde_name: &'static str,
    coords: [&'static str; 2],
) -> ResidualReport<F> {
    let worst = |pick: &dyn Fn(&NodeResidual<F>) -> Option<F>| {
        rows.iter()
            .filter_map(|r| pick(r).map(|v| (v, r.at)))
            .fold(None, |acc: Option<(F, (F, F))>, (v, at)| match acc {
                Some((m, _)) if m >= v => acc,
                _ => Some((v, at)),
            })
    };
    let (pde_max, pde_at) = worst(&|r| Some(r.pde)).unwrap_or((F::zero(), (F::nan(), F::nan())));
    let side = worst(&|r| r.side).map(|(m, at)| ResidualStat {
        name: "side_condition_residual",
        max_abs: m,
        tolerance: settings.side_tolerance,
        witness: at,
    });
    ResidualReport {
        pde: ResidualStat {
            name: pde_name,
            max_abs: pde_max,
            tolerance: settings.pde_tolerance,
            witness: pde_at,
        },
        side,
        nodes: rows.len(),
        h,
        coords,
    }
}

/// `max |u_yz − f(y,z,u)|` over all grid nodes, with `u_yz` from the cross
/// stencil of spacing `settings.h` evaluated off-grid on `u`.
pub fn mixed_residual<F: Scalar, U: ScalarField<F>>(
    u: &U,
    f: &Expr,
    grid: &Grid<F>,
    settings: &ResidualSettings<F>,
    side: Option<&SideCondition>,
) -> Result<ResidualReport<F>, NumericsError> {
    let fc = f.compile(&["y", "z", "u"])?;
    let h = settings.h;
    if !(h > F::zero()) {
        return Err(NumericsError::BadStep(to_f64(h)));
    }
    let (two, four) = (F::lit(2.0), F::lit(4.0));
    let nodes: Vec<(usize, usize)> = grid.indices().collect();
    let rows: Result<Vec<NodeResidual<F>>, NumericsError> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (y, z) = (grid.y_at(i), grid.z_at(j));
            let at = (y, z);
            let uc = u.value(y, z)?;
            let upp = u.value(y + h, z + h)?;
            let upm = u.value(y + h, z - h)?;
            let ump = u.value(y - h, z + h)?;
            let umm = u.value(y - h, z - h)?;
            let uyz = finite((upp - upm - ump + umm) / (four * h * h), at)?;
            let pde = finite((uyz - fc.eval(&[y, z, uc])?).abs(), at)?;
            let side = match side {
                Some(sc) => {
                    let uy = (u.value(y + h, z)? - u.value(y - h, z)?) / (two * h);
                    let uz = (u.value(y, z + h)? - u.value(y, z - h)?) / (two * h);
                    Some(finite(sc.residual(y, z, uc, uy, uz)?, at)?)
                }
                None => None,
            };
            Ok(NodeResidual { at, pde, side })
        })
        .collect();
    Ok(summarize(rows?, settings, h, "pde_residual", ["y", "z"]))
}

/// Same residuals on a sampled field, over interior nodes, with the grid
/// spacing as stencil width.
pub fn mixed_residual_sampled<F: Scalar>(
    field: &SolutionField<F>,
    f: &Expr,
    settings: &ResidualSettings<F>,
    side: Option<&SideCondition>,
) -> Result<ResidualReport<F>, NumericsError> {
    let fc = f.compile(&["y", "z", "u"])?;
    let g = field.grid;
    let (dy, dz) = (g.dy(), g.dz());
    let (two, four) = (F::lit(2.0), F::lit(4.0));
    let nodes: Vec<(usize, usize)> = (1..g.ny - 1).flat_map(|i| (1..g.nz - 1).map(move |j| (i, j))).collect();
    let rows: Result<Vec<NodeResidual<F>>, NumericsError> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (y, z) = (g.y_at(i), g.z_at(j));
            let at = (y, z);
            let u = |a: usize, b: usize| field.get(a, b);
            let uc = u(i, j);
            let uyz = (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (four * dy * dz);
            let pde = finite((uyz - fc.eval(&[y, z, uc])?).abs(), at)?;
            let side = match side {
                Some(sc) => {
                    let uy = (u(i + 1, j) - u(i - 1, j)) / (two * dy);
                    let uz = (u(i, j + 1) - u(i, j - 1)) / (two * dz);
                    Some(finite(sc.residual(y, z, uc, uy, uz)?, at)?)
                }
                None => None,
            };
            Ok(NodeResidual { at, pde, side })
        })
        .collect();
    Ok(summarize(rows?, settings, dy.max(dz), "pde_residual", ["y", "z"]))
}

/// `max |u_tt − u_xx − F(t,x,u)|` over a `(t, x)` grid (stored in the
/// grid's first and second axes).
pub fn wave_residual<F: Scalar, U: ScalarField<F>>(
    u: &U,
    rhs: &Expr,
    grid: &Grid<F>,
    settings: &ResidualSettings<F>,
) -> Result<ResidualReport<F>, NumericsError> {
    let fc = rhs.compile(&["t", "x", "u"])?;
    let h = settings.h;
    if !(h > F::zero()) {
        return Err(NumericsError::BadStep(to_f64(h)));
    }
    let two = F::lit(2.0);
    let nodes: Vec<(usize, usize)> = grid.indices().collect();
    let rows: Result<Vec<NodeResidual<F>>, NumericsError> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (t, x) = (grid.y_at(i), grid.z_at(j));
            let at = (t, x);
            let uc = u.value(t, x)?;
            let utt = (u.value(t + h, x)? - two * uc + u.value(t - h, x)?) / (h * h);
            let uxx = (u.value(t, x + h)? - two * uc + u.value(t, x - h)?) / (h * h);
            let pde = finite((utt - uxx - fc.eval(&[t, x, uc])?).abs(), at)?;
            Ok(NodeResidual { at, pde, side: None })
        })
        .collect();
    Ok(summarize(rows?, settings, h, "wave_residual", ["t", "x"]))
}
