//! Symmetry operators `Q = a∂_y + b∂_z + c∂_u` and the determining
//! equations of Q-conditional invariance for `u_yz = f(y,z,u)`.
//!
//! The side condition is taken as `a·u_y + b·u_z − c = 0`, so after
//! dividing by `a` it reads `u_y + K·u_z = L` with `K = b/a`, `L = c/a`.

use crate::expr::{is_zero, Expr, SamplingSpec, ZeroVerdict};
use crate::report::Check;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetsysError {
    #[error("zero operator: a, b and c all vanish identically")]
    ZeroOperator,
    #[error("K vanishes identically; route the operator to the Case 1 residuals")]
    DegenerateK,
    #[error("L_u vanishes identically; the first-order pair does not exist")]
    DegenerateL,
    #[error("`{0}` must not depend on u")]
    DependsOnU(&'static str),
    #[error("could not decide whether {0} vanishes identically (too many domain errors)")]
    Inconclusive(String),
}

/// Decides `e ≡ 0` by sampling; inconclusive sampling is an error.
pub fn vanishes(e: &Expr, what: &str, spec: &SamplingSpec) -> Result<bool, DetsysError> {
    match is_zero(e, spec).verdict {
        ZeroVerdict::Zero => Ok(true),
        ZeroVerdict::Nonzero(_) => Ok(false),
        ZeroVerdict::Inconclusive => Err(DetsysError::Inconclusive(what.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
}

impl QOperator {
    pub fn new(a: Expr, b: Expr, c: Expr) -> Self {
        QOperator { a, b, c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// `K ≡ 0`: side condition `u_y = L`.
    Case1,
    /// `a ≢ 0`, `K ≢ 0`: side condition `u_y + K·u_z = L`.
    Case2,
    /// `a ≡ b ≡ 0`: the side condition is an algebraic relation `c = 0`.
    Case3,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::Case1 => "case1",
            Case::Case2 => "case2",
            Case::Case3 => "case3",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedOperator {
    pub case: Case,
    pub k: Expr,
    pub l: Expr,
    /// `y` and `z` were exchanged to bring an `a ≡ 0` operator to Case 1.
    pub swapped: bool,
}

/// Brings `q` to one of the three normal forms.
pub fn normalize_operator(q: &QOperator, spec: &SamplingSpec) -> Result<NormalizedOperator, DetsysError> {
    let a_zero = vanishes(&q.a, "a", spec)?;
    if !a_zero {
        let k = (&q.b / &q.a).simplify();
        let l = (&q.c / &q.a).simplify();
        let case = if vanishes(&k, "K", spec)? {
            Case::Case1
        } else {
            Case::Case2
        };
        let k = if case == Case::Case1 { Expr::zero() } else { k };
        return Ok(NormalizedOperator {
            case,
            k,
            l,
            swapped: false,
        });
    }
    if !vanishes(&q.b, "b", spec)? {
        let l = (&q.c / &q.b).simplify().swap_yz();
        return Ok(NormalizedOperator {
            case: Case::Case1,
            k: Expr::zero(),
            l,
            swapped: true,
        });
    }
    if vanishes(&q.c, "c", spec)? {
        return Err(DetsysError::ZeroOperator);
    }
    Ok(NormalizedOperator {
        case: Case::Case3,
        k: Expr::zero(),
        l: q.c.simplify(),
        swapped: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub label: String,
    pub expr: Expr,
}

/// Named residual expressions; all must vanish for the property to hold.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Residuals {
    pub entries: Vec<Residual>,
}

impl Residuals {
    fn from_pairs(pairs: Vec<(&str, Expr)>) -> Self {
        Residuals {
            entries: pairs
                .into_iter()
                .map(|(label, e)| Residual {
                    label: label.to_string(),
                    expr: e.simplify(),
                })
                .collect(),
        }
    }

    pub fn get(&self, label: &str) -> Option<&Expr> {
        self.entries.iter().find(|r| r.label == label).map(|r| &r.expr)
    }

    pub fn check(&self, spec: &SamplingSpec) -> Vec<Check> {
        self.entries
            .iter()
            .map(|r| Check::vanishing(&r.label, &is_zero(&r.expr, spec)))
            .collect()
    }

    pub fn all_vanish(&self, spec: &SamplingSpec) -> bool {
        self.check(spec).iter().all(Check::passed)
    }
}

/// Determining equations R1..R4 for `u_y + K·u_z = L`, `K ≢ 0`.
pub fn residuals_case2(k: &Expr, l: &Expr, f: &Expr, spec: &SamplingSpec) -> Result<Residuals, DetsysError> {
    if vanishes(k, "K", spec)? {
        return Err(DetsysError::DegenerateK);
    }
    let ku = k.d(&["u"]);
    let kuu = ku.d(&["u"]);
    let ky = k.d(&["y"]);
    let kz = k.d(&["z"]);
    let kuy = ku.d(&["y"]);
    let kzu = kz.d(&["u"]);
    let kyz = ky.d(&["z"]);
    let lu = l.d(&["u"]);
    let luu = lu.d(&["u"]);
    let luy = lu.d(&["y"]);
    let luz = lu.d(&["z"]);
    let lz = l.d(&["z"]);
    let lyz = l.d(&["y", "z"]);
    let fy = f.d(&["y"]);
    let fz = f.d(&["z"]);
    let fu = f.d(&["u"]);
    let ku_l_over_k = &ku * l / k;

    let r1 = -(&ku * &ku) + &kuu * k;
    let r2 = -(k * &luu) + &ku * &ky / k + &ku * &ku * l / k + &ku * (&lu - &kz) - &kuy
        - l * &kuu
        + k * &kzu;
    let r3 = &luy - &luz * k + &luu * l - &lu * &ky / k + &ky * &kz / k - &kyz
        - 3 * &ku * f
        - &ku_l_over_k * (&lu - &kz)
        + &ku * &lz
        - &kzu * l;
    let r4 = -fy - k * &fz - l * &fu + &lyz + &luz * l + &lu * f
        - &ky / k * (&lz - f)
        - &kz * f
        - &ku_l_over_k * (&lz - f);
    Ok(Residuals::from_pairs(vec![
        ("R1", r1),
        ("R2", r2),
        ("R3", r3),
        ("R4", r4),
    ]))
}

/// Determining equations for the side condition `u_y = L`.
pub fn residuals_case1(l: &Expr, f: &Expr) -> Residuals {
    let lu = l.d(&["u"]);
    let r1 = lu.d(&["y"]) + lu.d(&["u"]) * l;
    let r2 = -f.d(&["y"]) - l * f.d(&["u"]) + l.d(&["y", "z"]) + lu.d(&["z"]) * l + &lu * f;
    Residuals::from_pairs(vec![("R1", r1), ("R2", r2)])
}

/// First-order system `u_y = L`, `u_z = M` equivalent to Case 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Case1Pair {
    pub rhs_y: Expr,
    pub rhs_z: Expr,
    /// `D_z L − D_y M` with `u_y → L`, `u_z → M` in the total derivatives.
    pub compatibility: Expr,
}

pub fn case1_pair(l: &Expr, f: &Expr, spec: &SamplingSpec) -> Result<Case1Pair, DetsysError> {
    let lu = l.d(&["u"]);
    if vanishes(&lu, "L_u", spec)? {
        return Err(DetsysError::DegenerateL);
    }
    let m = ((f - l.d(&["z"])) / &lu).simplify();
    let dz_l = l.d(&["z"]) + &lu * &m;
    let dy_m = m.d(&["y"]) + m.d(&["u"]) * l;
    Ok(Case1Pair {
        rhs_y: l.clone(),
        rhs_z: m,
        compatibility: (dz_l - dy_m).simplify(),
    })
}

/// Constraints on `(s, d)` for `K = e^u`, `L = s·e^u + d`, and the forced `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Case22 {
    pub s: Expr,
    pub d: Expr,
    pub c1: Expr,
    pub c2: Expr,
    pub f: Expr,
}

impl Case22 {
    /// `(K, L) = (e^u, s·e^u + d)`.
    pub fn operator(&self) -> (Expr, Expr) {
        let eu = Expr::var("u").exp();
        let l = (&self.s * &eu + &self.d).simplify();
        (eu, l)
    }

    pub fn constraints(&self) -> Residuals {
        Residuals::from_pairs(vec![("C1", self.c1.clone()), ("C2", self.c2.clone())])
    }
}

pub fn case22_check(s: &Expr, d: &Expr) -> Result<Case22, DetsysError> {
    let (s, d) = (s.simplify(), d.simplify());
    if s.contains("u") {
        return Err(DetsysError::DependsOnU("s"));
    }
    if d.contains("u") {
        return Err(DetsysError::DependsOnU("d"));
    }
    let sy = s.d(&["y"]);
    let dz = d.d(&["z"]);
    let c1 = 2 * s.d(&["y", "z"]) - &s * &dz + 2 * &sy * &s - d.d(&["z", "z"]);
    let c2 = -s.d(&["y", "y"]) + 2 * d.d(&["y", "z"]) + &sy * &d - 2 * &dz * &d;
    let f = ((&sy + &dz) / 3).simplify();
    Ok(Case22 {
        c1: c1.simplify(),
        c2: c2.simplify(),
        f,
        s,
        d,
    })
}

/// Normalized operator together with the residual set it was routed to.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub operator: NormalizedOperator,
    /// Right-hand side in the orientation the residuals use.
    pub f: Expr,
    pub residuals: Residuals,
}

/// Normalizes `q` and builds the matching determining equations for `f`.
/// `K ≡ 0` operators never reach the Case 2 residuals.
pub fn classify(q: &QOperator, f: &Expr, spec: &SamplingSpec) -> Result<Classification, DetsysError> {
    let op = normalize_operator(q, spec)?;
    let f = if op.swapped { f.swap_yz() } else { f.clone() };
    let residuals = match op.case {
        Case::Case1 => residuals_case1(&op.l, &f),
        Case::Case2 => residuals_case2(&op.k, &op.l, &f, spec)?,
        Case::Case3 => Residuals::default(),
    };
    Ok(Classification {
        operator: op,
        f,
        residuals,
    })
}
