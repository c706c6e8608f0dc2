//! Numeric evaluation, by tree walk or through a compiled postfix program.

use std::fmt;

use super::{BinOp, Expr, Func, Node, Number, Symbol};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    FractionalPowerOfNegative,
    ZeroToNegativePower,
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "log of non-positive value",
            DomainKind::SqrtOfNegative => "sqrt of negative value",
            DomainKind::FractionalPowerOfNegative => "fractional power of negative value",
            DomainKind::ZeroToNegativePower => "zero raised to a negative power",
            DomainKind::NonFinite => "non-finite value",
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{kind} in `{subexpr}`")]
    Domain { kind: DomainKind, subexpr: String },
}

/// Variable assignment. Linear lookup; expressions here have a handful of
/// variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings<F> {
    entries: Vec<(Symbol, F)>,
}

impl<F: Copy> Bindings<F> {
    pub fn new() -> Self {
        Bindings {
            entries: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, value: F) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: F) {
        match self.entries.iter_mut().find(|(s, _)| s.as_str() == name) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((Symbol::new(name), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<F> {
        self.entries
            .iter()
            .find(|(s, _)| s.as_str() == name)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, F)> {
        self.entries.iter().map(|(s, v)| (s.as_str(), *v))
    }
}

impl<F: Copy> FromIterator<(Symbol, F)> for Bindings<F> {
    fn from_iter<I: IntoIterator<Item = (Symbol, F)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (s, v) in iter {
            b.set(s.as_str(), v);
        }
        b
    }
}

fn number<F: Scalar>(n: Number) -> F {
    match n {
        Number::Rational(r) => {
            F::from_i64(*r.numer()).unwrap_or_else(F::nan)
                / F::from_i64(*r.denom()).unwrap_or_else(F::nan)
        }
        Number::Float(x) => F::from_f64(x).unwrap_or_else(F::nan),
    }
}

fn domain(kind: DomainKind, e: &Expr) -> EvalError {
    EvalError::Domain {
        kind,
        subexpr: e.to_string(),
    }
}

fn apply_unary<F: Scalar>(f: Func, a: F) -> Result<F, DomainKind> {
    Ok(match f {
        Func::Neg => -a,
        Func::Sin => a.sin(),
        Func::Cos => a.cos(),
        Func::Exp => a.exp(),
        Func::Log => {
            if a <= F::zero() {
                return Err(DomainKind::LogOfNonPositive);
            }
            a.ln()
        }
        Func::Sqrt => {
            if a < F::zero() {
                return Err(DomainKind::SqrtOfNegative);
            }
            a.sqrt()
        }
    })
}

fn integer_power<F: Scalar>(base: F, n: i64) -> Result<F, DomainKind> {
    if base == F::zero() && n < 0 {
        return Err(DomainKind::ZeroToNegativePower);
    }
    match i32::try_from(n) {
        Ok(k) => Ok(base.powi(k)),
        Err(_) => Ok(base.powf(F::from_i64(n).unwrap_or_else(F::nan))),
    }
}

fn apply_binary<F: Scalar>(op: BinOp, a: F, b: F) -> Result<F, DomainKind> {
    Ok(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == F::zero() {
                return Err(DomainKind::DivisionByZero);
            }
            a / b
        }
        BinOp::Pow => {
            if b.fract() == F::zero() && b.abs() < F::from_f64(2.0e9).unwrap_or_else(F::max_value) {
                return integer_power(a, b.to_i64().unwrap_or(0));
            }
            if a < F::zero() {
                return Err(DomainKind::FractionalPowerOfNegative);
            }
            if a == F::zero() && b < F::zero() {
                return Err(DomainKind::ZeroToNegativePower);
            }
            a.powf(b)
        }
    })
}

impl Expr {
    /// Evaluates at the given point. Any non-finite intermediate is an error.
    pub fn evaluate<F: Scalar>(&self, bindings: &Bindings<F>) -> Result<F, EvalError> {
        let mut scale = F::zero();
        self.eval_tracked(bindings, &mut scale)
    }

    /// Value together with the largest intermediate magnitude seen.
    pub fn evaluate_with_scale<F: Scalar>(
        &self,
        bindings: &Bindings<F>,
    ) -> Result<(F, F), EvalError> {
        let mut scale = F::zero();
        let v = self.eval_tracked(bindings, &mut scale)?;
        Ok((v, scale))
    }

    fn eval_tracked<F: Scalar>(&self, b: &Bindings<F>, scale: &mut F) -> Result<F, EvalError> {
        let v = match self.node() {
            Node::Num(n) => number(*n),
            Node::Var(s) => b
                .get(s.as_str())
                .ok_or_else(|| EvalError::Unbound(s.to_string()))?,
            Node::Unary(f, a) => {
                let x = a.eval_tracked(b, scale)?;
                apply_unary(*f, x).map_err(|k| domain(k, self))?
            }
            Node::Binary(BinOp::Pow, a, e) if e.as_number().and_then(Number::as_integer).is_some() => {
                let n = e.as_number().and_then(Number::as_integer).unwrap_or(1);
                let x = a.eval_tracked(b, scale)?;
                integer_power(x, n).map_err(|k| domain(k, self))?
            }
            Node::Binary(op, l, r) => {
                let x = l.eval_tracked(b, scale)?;
                let y = r.eval_tracked(b, scale)?;
                apply_binary(*op, x, y).map_err(|k| domain(k, self))?
            }
        };
        if !v.is_finite() {
            return Err(domain(DomainKind::NonFinite, self));
        }
        if v.abs() > *scale {
            *scale = v.abs();
        }
        Ok(v)
    }

    /// Compiles to a postfix program over the given variable slots.
    pub fn compile(&self, slots: &[&str]) -> Result<CompiledExpr, EvalError> {
        let mut c = CompiledExpr {
            ops: Vec::new(),
            slots: slots.iter().map(|s| s.to_string()).collect(),
            labels: Vec::new(),
            depth: 0,
        };
        let mut depth = 0;
        c.emit(self, &mut depth)?;
        Ok(c)
    }
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Slot(usize),
    Unary(Func, usize),
    Binary(BinOp, usize),
    PowInt(i64, usize),
}

/// Postfix program for fast repeated evaluation of one expression.
///
/// Slots are positional: `eval(&[y, z, u])` for a program compiled with
/// `&["y", "z", "u"]`.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    ops: Vec<Op>,
    slots: Vec<String>,
    labels: Vec<String>,
    depth: usize,
}

impl CompiledExpr {
    fn label(&mut self, e: &Expr) -> usize {
        self.labels.push(e.to_string());
        self.labels.len() - 1
    }

    fn emit(&mut self, e: &Expr, depth: &mut usize) -> Result<(), EvalError> {
        match e.node() {
            Node::Num(n) => {
                self.ops.push(Op::Const(n.to_f64()));
                self.push_depth(depth);
            }
            Node::Var(s) => {
                let idx = self
                    .slots
                    .iter()
                    .position(|n| n == s.as_str())
                    .ok_or_else(|| EvalError::Unbound(s.to_string()))?;
                self.ops.push(Op::Slot(idx));
                self.push_depth(depth);
            }
            Node::Unary(f, a) => {
                self.emit(a, depth)?;
                let l = self.label(e);
                self.ops.push(Op::Unary(*f, l));
            }
            Node::Binary(BinOp::Pow, a, p) if p.as_number().and_then(Number::as_integer).is_some() => {
                self.emit(a, depth)?;
                let n = p.as_number().and_then(Number::as_integer).unwrap_or(1);
                let l = self.label(e);
                self.ops.push(Op::PowInt(n, l));
            }
            Node::Binary(op, a, b) => {
                self.emit(a, depth)?;
                self.emit(b, depth)?;
                let l = self.label(e);
                self.ops.push(Op::Binary(*op, l));
                *depth -= 1;
            }
        }
        Ok(())
    }

    fn push_depth(&mut self, depth: &mut usize) {
        *depth += 1;
        self.depth = self.depth.max(*depth);
    }

    pub fn slots(&self) -> &[String] {
        &self.slots
    }

    pub fn eval<F: Scalar>(&self, args: &[F]) -> Result<F, EvalError> {
        assert_eq!(args.len(), self.slots.len(), "argument count mismatch");
        let mut stack: Vec<F> = Vec::with_capacity(self.depth);
        let fail = |k: DomainKind, l: usize| EvalError::Domain {
            kind: k,
            subexpr: self.labels[l].clone(),
        };
        for op in &self.ops {
            match op {
                Op::Const(c) => stack.push(F::from_f64(*c).unwrap_or_else(F::nan)),
                Op::Slot(i) => stack.push(args[*i]),
                Op::Unary(f, l) => {
                    let a = stack.pop().expect("operand");
                    let v = apply_unary(*f, a).map_err(|k| fail(k, *l))?;
                    if !v.is_finite() {
                        return Err(fail(DomainKind::NonFinite, *l));
                    }
                    stack.push(v);
                }
                Op::PowInt(n, l) => {
                    let a = stack.pop().expect("operand");
                    let v = integer_power(a, *n).map_err(|k| fail(k, *l))?;
                    if !v.is_finite() {
                        return Err(fail(DomainKind::NonFinite, *l));
                    }
                    stack.push(v);
                }
                Op::Binary(op, l) => {
                    let b = stack.pop().expect("operand");
                    let a = stack.pop().expect("operand");
                    let v = apply_binary(*op, a, b).map_err(|k| fail(k, *l))?;
                    if !v.is_finite() {
                        return Err(fail(DomainKind::NonFinite, *l));
                    }
                    stack.push(v);
                }
            }
        }
        let v = stack.pop().expect("result");
        if !v.is_finite() {
            return Err(EvalError::Domain {
                kind: DomainKind::NonFinite,
                subexpr: self.labels.last().cloned().unwrap_or_default(),
            });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn identity_and_arithmetic() {
        let e = parse("exp(y)").unwrap();
        assert_eq!(e.evaluate(&Bindings::new().with("y", 0.0)).unwrap(), 1.0);
        let e = parse("y^2/z").unwrap();
        let v: f64 = e.evaluate(&Bindings::new().with("y", 2.0).with("z", 4.0)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn singular_point_is_an_error() {
        let e = parse("1/y").unwrap();
        let err = e.evaluate(&Bindings::new().with("y", 0.0f64)).unwrap_err();
        assert_eq!(
            err,
            EvalError::Domain {
                kind: DomainKind::DivisionByZero,
                subexpr: "1/y".into()
            }
        );
        for (text, kind) in [
            ("log(y - 1)", DomainKind::LogOfNonPositive),
            ("sqrt(-y)", DomainKind::SqrtOfNegative),
            ("(-y)^0.5", DomainKind::FractionalPowerOfNegative),
            ("(y - 1)^(-2)", DomainKind::ZeroToNegativePower),
            ("exp(1000*y)", DomainKind::NonFinite),
        ] {
            let e = parse(text).unwrap();
            match e.evaluate(&Bindings::new().with("y", 1.0f64)) {
                Err(EvalError::Domain { kind: k, .. }) => assert_eq!(k, kind, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn unbound_variable() {
        let e = parse("y + z").unwrap();
        let err = e.evaluate(&Bindings::new().with("y", 1.0f64)).unwrap_err();
        assert_eq!(err, EvalError::Unbound("z".into()));
        assert!(e.compile(&["y"]).is_err());
    }

    #[test]
    fn negative_base_integer_power() {
        let e = parse("y^3 + y^(-1)").unwrap();
        let v: f64 = e.evaluate(&Bindings::new().with("y", -2.0)).unwrap();
        assert_eq!(v, -8.5);
    }

    #[test]
    fn compiled_matches_tree_walk() {
        let e = parse("sin(y*z)^2 + exp(-u)/(1+y^2) - sqrt(z)*log(u)").unwrap();
        let c = e.compile(&["y", "z", "u"]).unwrap();
        for (y, z, u) in [(0.5, 1.5, 0.7), (1.9, 0.6, 1.3), (-0.4, 2.0, 3.0)] {
            let tree: f64 = e
                .evaluate(&Bindings::new().with("y", y).with("z", z).with("u", u))
                .unwrap();
            let fast: f64 = c.eval(&[y, z, u]).unwrap();
            assert_eq!(tree, fast);
        }
        assert!(c.eval(&[1.0, -1.0, 1.0f64]).is_err());
    }

    #[test]
    fn single_precision() {
        let e = parse("y*y - 2").unwrap();
        let v: f32 = e.evaluate(&Bindings::new().with("y", 1.5f32)).unwrap();
        assert!((v - 0.25).abs() < 1e-6);
    }

    #[test]
    fn scale_tracks_largest_intermediate() {
        let e = parse("(y+z)^2 - y^2 - 2*y*z - z^2").unwrap();
        let (v, scale) = e
            .evaluate_with_scale(&Bindings::new().with("y", 1.0f64).with("z", 3.0))
            .unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(scale, 16.0);
    }
}
