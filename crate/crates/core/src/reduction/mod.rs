//! Reduction of `u_yz = f(y,z,u)` by the operator generated from `T(y,z)`:
//!
//! `Q = ∂_y + k·∂_z + s·u·∂_u`, `k = T_y/T_z`, `s = T_yz/T_z`.
//!
//! Solutions invariant under `Q` have the form `u = σ(y,z)·φ(ω)` where
//! `ω` is constant along `dz/dy = k` and `σ² = T_z/ω_z`. Right-hand sides of
//! the form
//!
//! `f = T_y·T_z/σ³ · Φ(ω, u/σ) + σ_yz/σ · u`
//!
//! reduce the equation to `φ'' = −Φ(ω, φ)`.

mod catalog;
mod characteristics;

use std::fmt;

pub use catalog::{families, lookup, Family};
pub use characteristics::{Bounds, NumericInvariant, DEFAULT_CHARACTERISTIC_STEP, DEFAULT_REFERENCE_Y};

use crate::detsys::{residuals_case2, vanishes, DetsysError, Residuals};
use crate::expr::{is_zero, sample_values, BinOp, CompiledExpr, EvalError, Expr, Node, SamplingSpec, ZeroCheck};
use crate::report::Check;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    #[error("degenerate generating function: {0} vanishes identically")]
    DegenerateT(&'static str),
    #[error("no catalog family matches T = {0}")]
    UnknownFamily(String),
    #[error("characteristic from ({:.6}, {:.6}) left the box at ({:.6}, {:.6})", start.0, start.1, at.0, at.1)]
    CharacteristicEscape { start: (f64, f64), at: (f64, f64) },
    #[error("invalid setting: {0}")]
    BadSettings(&'static str),
    #[error("T_z/omega_z is negative on the domain; use -omega instead")]
    Sign,
    #[error("T_z/omega_z changes sign or vanishes on the domain")]
    SignChange,
    #[error("omega_z vanishes identically")]
    OmegaDegenerate,
    #[error("omega = {0} is not constant along the characteristics")]
    NotInvariant(String),
    #[error("inconsistent multiplier: {0} does not vanish")]
    Inconsistent(&'static str),
    #[error("Phi may depend only on omega and phi, found `{0}`")]
    PhiVariables(String),
    #[error(transparent)]
    Detsys(#[from] DetsysError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn decide(e: &Expr, what: &'static str, spec: &SamplingSpec) -> Result<bool, ReductionError> {
    Ok(vanishes(e, what, spec)?)
}

/// `T` with the coefficients of the operator it generates.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub t: Expr,
    pub k: Expr,
    pub s: Expr,
}

impl Generator {
    /// `(K, L) = (k, s·u)` in the normalized form `u_y + K·u_z = L`.
    pub fn operator(&self) -> (Expr, Expr) {
        (self.k.clone(), (&self.s * &Expr::var("u")).simplify())
    }
}

/// Computes `k = T_y/T_z` and `s = T_yz/T_z`.
pub fn derive_k_s(t: &Expr, spec: &SamplingSpec) -> Result<Generator, ReductionError> {
    if t.contains("u") {
        return Err(DetsysError::DependsOnU("T").into());
    }
    let ty = t.d(&["y"]);
    let tz = t.d(&["z"]);
    if decide(&tz, "T_z", spec)? {
        return Err(ReductionError::DegenerateT("T_z"));
    }
    if decide(&ty, "T_y", spec)? {
        return Err(ReductionError::DegenerateT("T_y"));
    }
    Ok(Generator {
        t: t.clone(),
        k: (&ty / &tz).simplify(),
        s: (t.d(&["y", "z"]) / &tz).simplify(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum InvariantMode {
    Catalog,
    Numeric {
        reference_y: f64,
        bounds: Bounds,
        step: f64,
    },
}

impl InvariantMode {
    pub fn numeric() -> Self {
        InvariantMode::Numeric {
            reference_y: DEFAULT_REFERENCE_Y,
            bounds: Bounds::default(),
            step: DEFAULT_CHARACTERISTIC_STEP,
        }
    }
}

/// A first integral of `dz/dy = k`, in closed form or by integration.
#[derive(Clone, Debug)]
pub enum Invariant {
    Closed(Expr),
    Numeric(NumericInvariant),
}

impl Invariant {
    pub fn closed(&self) -> Option<&Expr> {
        match self {
            Invariant::Closed(e) => Some(e),
            Invariant::Numeric(_) => None,
        }
    }

    pub fn value<F: Scalar>(&self, y: F, z: F) -> Result<F, ReductionError> {
        match self {
            Invariant::Closed(e) => Ok(e.compile(&["y", "z"])?.eval(&[y, z])?),
            Invariant::Numeric(n) => n.label(y, z),
        }
    }
}

/// The invariant `ω` of the operator generated by `t`.
pub fn invariant_omega(t: &Expr, mode: &InvariantMode, spec: &SamplingSpec) -> Result<Invariant, ReductionError> {
    let g = derive_k_s(t, spec)?;
    match mode {
        InvariantMode::Catalog => lookup(t, spec)
            .map(|fam| Invariant::Closed(fam.omega))
            .ok_or_else(|| ReductionError::UnknownFamily(t.to_string())),
        InvariantMode::Numeric { reference_y, bounds, step } => {
            Ok(Invariant::Numeric(NumericInvariant::new(&g.k, *reference_y, *bounds, *step)?))
        }
    }
}

/// `T_y·ω_z + T_z·ω_y`, zero exactly when `ω` is an invariant.
pub fn omega_equation(t: &Expr, omega: &Expr) -> Expr {
    (t.d(&["y"]) * omega.d(&["z"]) + t.d(&["z"]) * omega.d(&["y"])).simplify()
}

/// `T_y·σ_z + T_z·σ_y − σ·T_yz`.
pub fn sigma_equation(t: &Expr, sigma: &Expr) -> Expr {
    (t.d(&["y"]) * sigma.d(&["z"]) + t.d(&["z"]) * sigma.d(&["y"]) - sigma * &t.d(&["y", "z"])).simplify()
}

/// `ω_y·σ_z + ω_z·σ_y + σ·ω_yz`, the coefficient of `φ'` after substituting
/// the ansatz.
pub fn reduction_identity_residual(sigma: &Expr, omega: &Expr) -> Expr {
    (omega.d(&["y"]) * sigma.d(&["z"]) + omega.d(&["z"]) * sigma.d(&["y"]) + sigma * &omega.d(&["y", "z"])).simplify()
}

/// Whether `σ_y = k·σ_z`, in which case `u = φ(ω)` already reduces the equation.
pub fn phi_only_criterion(sigma: &Expr, k: &Expr, spec: &SamplingSpec) -> ZeroCheck {
    let e = (sigma.d(&["y"]) - k * &sigma.d(&["z"])).simplify();
    is_zero(&e, spec)
}

/// Square root read off the factor structure, if `e` is visibly a square.
fn structural_sqrt(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Num(n) => n.exact_sqrt().map(Expr::number),
        Node::Binary(BinOp::Pow, base, exp) => {
            let n = exp.as_number()?.as_integer()?;
            (n % 2 == 0).then(|| base.powi(n / 2))
        }
        Node::Binary(BinOp::Mul, a, b) => Some(structural_sqrt(a)? * structural_sqrt(b)?),
        Node::Binary(BinOp::Div, a, b) => Some(structural_sqrt(a)? / structural_sqrt(b)?),
        _ => None,
    }
}

fn positive_on(e: &Expr, spec: &SamplingSpec) -> Option<bool> {
    let values: Vec<f64> = sample_values(e, spec).into_iter().flatten().collect();
    if values.is_empty() {
        return None;
    }
    if values.iter().all(|&v| v > 0.0) {
        Some(true)
    } else if values.iter().all(|&v| v < 0.0) {
        Some(false)
    } else {
        None
    }
}

/// The positive multiplier `σ = sqrt(T_z/ω_z)`.
pub fn sigma_from(t: &Expr, omega: &Expr, spec: &SamplingSpec) -> Result<Expr, ReductionError> {
    let g = derive_k_s(t, spec)?;
    let wz = omega.d(&["z"]);
    if decide(&wz, "omega_z", spec)? {
        return Err(ReductionError::OmegaDegenerate);
    }
    if !decide(&omega_equation(&g.t, omega), "omega equation", spec)? {
        return Err(ReductionError::NotInvariant(omega.to_string()));
    }
    let q = (t.d(&["z"]) / &wz).simplify();
    match positive_on(&q, spec) {
        Some(true) => {}
        Some(false) => return Err(ReductionError::Sign),
        None => return Err(ReductionError::SignChange),
    }
    let consistency = (&q + &(t.d(&["y"]) / omega.d(&["y"]))).simplify();
    if !decide(&consistency, "sigma^2 consistency", spec)? {
        return Err(ReductionError::Inconsistent("T_z/omega_z + T_y/omega_y"));
    }
    let sigma = structural_sqrt(&q)
        .map(|r| r.simplify())
        .filter(|r| {
            positive_on(r, spec) == Some(true)
                && is_zero(&(r.powi(2) - &q), spec).verdict.is_zero()
        })
        .unwrap_or_else(|| q.sqrt());
    if !decide(&sigma_equation(t, &sigma), "sigma equation", spec)? {
        return Err(ReductionError::Inconsistent("T_y*sigma_z + T_z*sigma_y - sigma*T_yz"));
    }
    Ok(sigma)
}

fn check_phi(phi: &Expr) -> Result<(), ReductionError> {
    match phi.variables().into_iter().find(|v| v.as_str() != "omega" && v.as_str() != "phi") {
        Some(v) => Err(ReductionError::PhiVariables(v.to_string())),
        None => Ok(()),
    }
}

/// Everything the construction produces for one `(T, Φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionData {
    pub t: Expr,
    pub k: Expr,
    pub s: Expr,
    pub omega: Expr,
    pub sigma: Expr,
    pub phi_rhs: Expr,
    pub f: Expr,
}

impl ReductionData {
    pub fn operator(&self) -> (Expr, Expr) {
        (self.k.clone(), (&self.s * &Expr::var("u")).simplify())
    }

    /// R1..R4 for the operator and the synthesized `f`.
    pub fn residuals(&self, spec: &SamplingSpec) -> Result<Residuals, ReductionError> {
        let (k, l) = self.operator();
        Ok(residuals_case2(&k, &l, &self.f, spec)?)
    }

    pub fn reduced_ode(&self) -> Result<ReducedOde, ReductionError> {
        reduced_ode(&self.phi_rhs)
    }
}

/// `T`, `ω` and `σ`; synthesizes right-hand sides for any `Φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub generator: Generator,
    pub omega: Expr,
    pub sigma: Expr,
}

impl Reduction {
    /// Uses the catalog invariant for `t`.
    pub fn new(t: &Expr, spec: &SamplingSpec) -> Result<Self, ReductionError> {
        let omega = match invariant_omega(t, &InvariantMode::Catalog, spec)? {
            Invariant::Closed(e) => e,
            Invariant::Numeric(_) => unreachable!("catalog mode yields closed forms"),
        };
        Self::with_omega(t, &omega, spec)
    }

    pub fn with_omega(t: &Expr, omega: &Expr, spec: &SamplingSpec) -> Result<Self, ReductionError> {
        let generator = derive_k_s(t, spec)?;
        let sigma = sigma_from(t, omega, spec)?;
        Ok(Reduction {
            generator,
            omega: omega.clone(),
            sigma,
        })
    }

    /// The structural relations between `T`, `ω` and `σ`, as residuals.
    pub fn identity_residuals(&self) -> Vec<(&'static str, Expr)> {
        let t = &self.generator.t;
        let (w, sg) = (&self.omega, &self.sigma);
        let s2 = sg.powi(2);
        vec![
            ("omega_equation", omega_equation(t, w)),
            ("sigma_equation", sigma_equation(t, sg)),
            ("sigma_squared_tz", (&s2 - &(t.d(&["z"]) / w.d(&["z"]))).simplify()),
            ("sigma_squared_ty", (&s2 + &(t.d(&["y"]) / w.d(&["y"]))).simplify()),
            ("no_dphi_identity", reduction_identity_residual(sg, w)),
        ]
    }

    pub fn identities(&self, spec: &SamplingSpec) -> Vec<Check> {
        self.identity_residuals()
            .into_iter()
            .map(|(name, e)| Check::vanishing(name, &is_zero(&e, spec)))
            .collect()
    }

    pub fn phi_only(&self, spec: &SamplingSpec) -> ZeroCheck {
        phi_only_criterion(&self.sigma, &self.generator.k, spec)
    }

    /// `f = T_y·T_z/σ³ · Φ(ω, u/σ) + σ_yz/σ · u`.
    pub fn synthesize(&self, phi: &Expr) -> Result<ReductionData, ReductionError> {
        check_phi(phi)?;
        let t = &self.generator.t;
        let sigma = &self.sigma;
        let u = Expr::var("u");
        let inner = phi.substitute_all(&[("omega", self.omega.clone()), ("phi", &u / sigma)]);
        let f = t.d(&["y"]) * t.d(&["z"]) / sigma.powi(3) * inner + sigma.d(&["y", "z"]) / sigma * u;
        Ok(ReductionData {
            t: t.clone(),
            k: self.generator.k.clone(),
            s: self.generator.s.clone(),
            omega: self.omega.clone(),
            sigma: sigma.clone(),
            phi_rhs: phi.clone(),
            f: f.simplify(),
        })
    }

    /// Coefficients of the equation obtained by substituting the ansatz.
    pub fn reduced_form(&self, phi: &Expr) -> ReducedForm {
        let t = &self.generator.t;
        let (w, sg) = (&self.omega, &self.sigma);
        ReducedForm {
            second: (sg * &w.d(&["y"]) * w.d(&["z"])).simplify(),
            first: reduction_identity_residual(sg, w),
            source: (t.d(&["y"]) * t.d(&["z"]) / sg.powi(3)).simplify(),
            phi_rhs: phi.clone(),
        }
    }
}

/// Convenience for the whole chain with the catalog invariant.
pub fn synthesize_f(t: &Expr, phi: &Expr, spec: &SamplingSpec) -> Result<Expr, ReductionError> {
    Ok(Reduction::new(t, spec)?.synthesize(phi)?.f)
}

/// `second·φ'' + first·φ' = source·Φ(ω, φ)`, the reduced equation before
/// the identities `σ²ω_z = T_z`, `σ²ω_y = −T_y` are used.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedForm {
    pub second: Expr,
    pub first: Expr,
    pub source: Expr,
    pub phi_rhs: Expr,
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})*phi'' + ({})*phi' = ({})*({})",
            self.second, self.first, self.source, self.phi_rhs
        )
    }
}

/// `φ'' = rhs(ω, φ)` with `rhs = −Φ`.
#[derive(Clone, Debug)]
pub struct ReducedOde {
    pub rhs: Expr,
    compiled: CompiledExpr,
}

impl ReducedOde {
    pub fn eval<F: Scalar>(&self, omega: F, phi: F) -> Result<F, EvalError> {
        self.compiled.eval(&[omega, phi])
    }
}

pub fn reduced_ode(phi: &Expr) -> Result<ReducedOde, ReductionError> {
    check_phi(phi)?;
    let rhs = (-phi).simplify();
    let compiled = rhs.compile(&["omega", "phi"])?;
    Ok(ReducedOde { rhs, compiled })
}
