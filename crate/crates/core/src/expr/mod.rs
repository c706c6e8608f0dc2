//! Immutable symbolic expressions.
//!
//! An [`Expr`] is a reference-counted tree of numeric literals, variables,
//! elementary functions and binary arithmetic. Trees are never mutated after
//! construction, so cloning is cheap and values can be shared across threads.
//!
//! The arithmetic operators (`+`, `-`, `*`, `/`, unary `-`) and [`Expr::pow`]
//! apply local rewrites (constant folding, 0/1 absorption). Heavier
//! normalization lives in [`Expr::simplify`], and semantic zero tests go
//! through [`is_zero`].

mod diff;
mod eval;
mod parse;
mod print;
mod simplify;
mod zero;

pub use eval::{Bindings, CompiledExpr, DomainKind, EvalError};
pub use parse::{parse, parse_with, Alphabet, ParseError, ParseErrorKind};
pub use zero::{is_zero, sample_values, SamplingSpec, Witness, ZeroCheck, ZeroVerdict};

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, One, Signed, ToPrimitive, Zero};

/// Variable name. All symbols are global; there is no binding construct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Numeric literal: exact rational, or a float when exactness was lost.
#[derive(Clone, Copy, Debug)]
pub enum Number {
    Rational(Rational64),
    Float(f64),
}

impl Number {
    pub fn int(n: i64) -> Self {
        Number::Rational(Rational64::from_integer(n))
    }

    /// `p/q`; panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Number::Rational(Rational64::new(p, q))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Float(x) => x == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Float(x) => x == 1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Float(x) => x < 0.0,
        }
    }

    /// The value as an `i64` when it is an exact integer.
    pub fn as_integer(self) -> Option<i64> {
        match self {
            Number::Rational(r) if r.is_integer() => Some(*r.numer()),
            Number::Float(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Some(x as i64),
            _ => None,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            Number::Rational(r) => match r.numer().checked_neg() {
                Some(n) => Number::Rational(Rational64::new_raw(n, *r.denom())),
                None => Number::Float(-self.to_f64()),
            },
            Number::Float(x) => Number::Float(-x),
        }
    }

    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a
                .checked_add(&b)
                .map(Number::Rational)
                .unwrap_or_else(|| Number::Float(self.to_f64() + other.to_f64())),
            _ => Number::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a
                .checked_mul(&b)
                .map(Number::Rational)
                .unwrap_or_else(|| Number::Float(self.to_f64() * other.to_f64())),
            _ => Number::Float(self.to_f64() * other.to_f64()),
        }
    }

    /// `self / other`, or `None` when `other` is zero.
    pub fn div(self, other: Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a
                .checked_div(&b)
                .map(Number::Rational)
                .unwrap_or_else(|| Number::Float(self.to_f64() / other.to_f64())),
            _ => Number::Float(self.to_f64() / other.to_f64()),
        })
    }

    /// Integer power. `None` for `0^negative` or when a float result is not finite.
    pub fn powi(self, n: i64) -> Option<Self> {
        if self.is_zero() && n < 0 {
            return None;
        }
        match self {
            Number::Rational(r) if n.unsigned_abs() <= 64 => {
                let mut acc = Rational64::one();
                let mut exact = true;
                for _ in 0..n.unsigned_abs() {
                    match acc.checked_mul(&r) {
                        Some(v) => acc = v,
                        None => {
                            exact = false;
                            break;
                        }
                    }
                }
                if exact {
                    let v = if n < 0 { acc.recip() } else { acc };
                    return Some(Number::Rational(v));
                }
                let x = self.to_f64().powi(n as i32);
                x.is_finite().then_some(Number::Float(x))
            }
            _ => {
                let x = self.to_f64().powf(n as f64);
                x.is_finite().then_some(Number::Float(x))
            }
        }
    }

    /// Exact square root of a non-negative rational perfect square.
    pub fn exact_sqrt(self) -> Option<Self> {
        let Number::Rational(r) = self else { return None };
        if r.is_negative() {
            return None;
        }
        let root = |v: i64| {
            let s = (v as f64).sqrt().round() as i64;
            (s.checked_mul(s) == Some(v)).then_some(s)
        };
        Some(Number::Rational(Rational64::new(root(*r.numer())?, root(*r.denom())?)))
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a.cmp(b),
            (Number::Rational(_), Number::Float(_)) => Ordering::Less,
            (Number::Float(_), Number::Rational(_)) => Ordering::Greater,
            (Number::Float(a), Number::Float(b)) => a.total_cmp(b),
        }
    }
}

/// Structural equality: `1` and `1.0` are different literals.
impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl Eq for Number {}

impl From<i64> for Number {
    fn from(n: i64) -> Self {
        Number::int(n)
    }
}

/// Unary nodes. `Neg` is a node rather than a multiplication by `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Neg => "-",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    Num(Number),
    Var(Symbol),
    Unary(Func, Expr),
    Binary(BinOp, Expr, Expr),
}

/// Shared handle to an immutable expression tree.
///
/// `PartialEq`/`Ord` are structural. Use [`is_zero`] on a difference for
/// semantic comparison.
#[derive(Clone, PartialEq, Eq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn number(n: Number) -> Self {
        Expr(Arc::new(Node::Num(n)))
    }

    pub fn int(n: i64) -> Self {
        Expr::number(Number::int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Expr::number(Number::ratio(p, q))
    }

    pub fn float(x: f64) -> Self {
        Expr::number(Number::Float(x))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Self {
        Expr::symbol(Symbol::new(name))
    }

    pub fn symbol(s: Symbol) -> Self {
        Expr(Arc::new(Node::Var(s)))
    }

    /// Unary node without any rewriting.
    pub fn raw_unary(f: Func, a: Expr) -> Self {
        Expr(Arc::new(Node::Unary(f, a)))
    }

    /// Binary node without any rewriting.
    pub fn raw_binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr(Arc::new(Node::Binary(op, a, b)))
    }

    pub fn as_number(&self) -> Option<Number> {
        match self.node() {
            Node::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Var(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    pub fn sin(&self) -> Self {
        self.apply(Func::Sin)
    }

    pub fn cos(&self) -> Self {
        self.apply(Func::Cos)
    }

    pub fn exp(&self) -> Self {
        self.apply(Func::Exp)
    }

    pub fn log(&self) -> Self {
        self.apply(Func::Log)
    }

    pub fn sqrt(&self) -> Self {
        self.apply(Func::Sqrt)
    }

    /// Applies `f` with constant folding of the exactly representable cases.
    pub fn apply(&self, f: Func) -> Self {
        if f == Func::Neg {
            return -self;
        }
        if let Some(n) = self.as_number() {
            if let Some(v) = fold_func(f, n) {
                return Expr::number(v);
            }
        }
        if let (Func::Log, Node::Unary(Func::Exp, inner)) = (f, self.node()) {
            return inner.clone();
        }
        Expr::raw_unary(f, self.clone())
    }

    /// `self ^ exponent` with local folding.
    pub fn pow(&self, exponent: &Expr) -> Self {
        if exponent.is_zero_literal() {
            return Expr::one();
        }
        if exponent.is_one_literal() {
            return self.clone();
        }
        if self.is_one_literal() {
            return Expr::one();
        }
        if let (Some(b), Some(e)) = (self.as_number(), exponent.as_number()) {
            if let Some(n) = e.as_integer() {
                if let Some(v) = b.powi(n) {
                    return Expr::number(v);
                }
            } else if matches!(b, Number::Float(_)) || matches!(e, Number::Float(_)) {
                let (bf, ef) = (b.to_f64(), e.to_f64());
                let v = bf.powf(ef);
                if bf >= 0.0 && v.is_finite() {
                    return Expr::float(v);
                }
            }
        }
        Expr::raw_binary(BinOp::Pow, self.clone(), exponent.clone())
    }

    pub fn powi(&self, n: i64) -> Self {
        self.pow(&Expr::int(n))
    }

    /// Free variables in sorted order.
    pub fn variables(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Var(s) => {
                out.insert(s.clone());
            }
            Node::Unary(_, a) => a.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Var(s) => s.as_str() == name,
            Node::Unary(_, a) => a.contains(name),
            Node::Binary(_, a, b) => a.contains(name) || b.contains(name),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Var(_) => 1,
            Node::Unary(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Replaces every occurrence of `v` by `replacement`.
    pub fn substitute(&self, v: &str, replacement: &Expr) -> Expr {
        self.substitute_all(&[(v, replacement.clone())])
    }

    /// Simultaneous substitution: replacements are not themselves rewritten.
    pub fn substitute_all(&self, pairs: &[(&str, Expr)]) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Var(s) => pairs
                .iter()
                .find(|(name, _)| *name == s.as_str())
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| self.clone()),
            Node::Unary(f, a) => a.substitute_all(pairs).apply(*f),
            Node::Binary(op, a, b) => {
                let (a, b) = (a.substitute_all(pairs), b.substitute_all(pairs));
                binary(*op, &a, &b)
            }
        }
    }

    /// Exchanges the roles of `y` and `z`.
    pub fn swap_yz(&self) -> Expr {
        self.substitute_all(&[("y", Expr::var("z")), ("z", Expr::var("y"))])
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total structural order used to sort factors and terms.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        fn rank(n: &Node) -> u8 {
            match n {
                Node::Num(_) => 0,
                Node::Var(_) => 1,
                Node::Unary(..) => 2,
                Node::Binary(..) => 3,
            }
        }
        match (self.node(), other.node()) {
            (Node::Num(a), Node::Num(b)) => a.total_cmp(b),
            (Node::Var(a), Node::Var(b)) => a.cmp(b),
            (Node::Unary(f, a), Node::Unary(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Node::Binary(o, a1, b1), Node::Binary(p, a2, b2)) => o
                .cmp(p)
                .then_with(|| a1.cmp(a2))
                .then_with(|| b1.cmp(b2)),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

fn fold_func(f: Func, n: Number) -> Option<Number> {
    if let Number::Float(x) = n {
        let v = match f {
            Func::Neg => -x,
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Log if x > 0.0 => x.ln(),
            Func::Sqrt if x >= 0.0 => x.sqrt(),
            _ => return None,
        };
        return v.is_finite().then_some(Number::Float(v));
    }
    match f {
        Func::Neg => Some(n.neg()),
        Func::Sin if n.is_zero() => Some(Number::int(0)),
        Func::Cos | Func::Exp if n.is_zero() => Some(Number::int(1)),
        Func::Log if n.is_one() => Some(Number::int(0)),
        Func::Sqrt => n.exact_sqrt(),
        _ => None,
    }
}

/// Binary node through the folding constructors.
pub fn binary(op: BinOp, a: &Expr, b: &Expr) -> Expr {
    match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Pow => a.pow(b),
    }
}

fn add_expr(a: &Expr, b: &Expr) -> Expr {
    match (a.as_number(), b.as_number()) {
        (Some(x), Some(y)) => Expr::number(x.add(y)),
        (Some(x), _) if x.is_zero() => b.clone(),
        (_, Some(y)) if y.is_zero() => a.clone(),
        _ => Expr::raw_binary(BinOp::Add, a.clone(), b.clone()),
    }
}

fn sub_expr(a: &Expr, b: &Expr) -> Expr {
    match (a.as_number(), b.as_number()) {
        (Some(x), Some(y)) => Expr::number(x.add(y.neg())),
        (_, Some(y)) if y.is_zero() => a.clone(),
        (Some(x), _) if x.is_zero() => neg_expr(b),
        _ if a == b => Expr::zero(),
        _ => Expr::raw_binary(BinOp::Sub, a.clone(), b.clone()),
    }
}

fn mul_expr(a: &Expr, b: &Expr) -> Expr {
    match (a.as_number(), b.as_number()) {
        (Some(x), Some(y)) => Expr::number(x.mul(y)),
        (Some(x), _) | (_, Some(x)) if x.is_zero() => Expr::zero(),
        (Some(x), _) if x.is_one() => b.clone(),
        (_, Some(y)) if y.is_one() => a.clone(),
        (Some(x), _) if x.neg().is_one() => neg_expr(b),
        (_, Some(y)) if y.neg().is_one() => neg_expr(a),
        _ => Expr::raw_binary(BinOp::Mul, a.clone(), b.clone()),
    }
}

fn div_expr(a: &Expr, b: &Expr) -> Expr {
    match (a.as_number(), b.as_number()) {
        (Some(x), Some(y)) => match x.div(y) {
            Some(v) => Expr::number(v),
            None => Expr::raw_binary(BinOp::Div, a.clone(), b.clone()),
        },
        (Some(x), _) if x.is_zero() => Expr::zero(),
        (_, Some(y)) if y.is_one() => a.clone(),
        _ => Expr::raw_binary(BinOp::Div, a.clone(), b.clone()),
    }
}

fn neg_expr(a: &Expr) -> Expr {
    match a.node() {
        Node::Num(n) => Expr::number(n.neg()),
        Node::Unary(Func::Neg, inner) => inner.clone(),
        _ => Expr::raw_unary(Func::Neg, a.clone()),
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(self, &rhs)
            }
        }
        impl std::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(&self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(&self, &rhs)
            }
        }
        impl std::ops::$trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $f(&self, &Expr::int(rhs))
            }
        }
        impl std::ops::$trait<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $f(self, &Expr::int(rhs))
            }
        }
        impl std::ops::$trait<Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(&Expr::int(self), &rhs)
            }
        }
        impl std::ops::$trait<&Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(&Expr::int(self), rhs)
            }
        }
    };
}

impl_binop!(Add, add, add_expr);
impl_binop!(Sub, sub, sub_expr);
impl_binop!(Mul, mul, mul_expr);
impl_binop!(Div, div, div_expr);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg_expr(self)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg_expr(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::erasing_op, clippy::identity_op)]
    fn folding_constructors() {
        let y = Expr::var("y");
        assert_eq!(&y + 0, y);
        assert_eq!(&y * 1, y);
        assert_eq!(&y * 0, Expr::zero());
        assert_eq!(&y - &y, Expr::zero());
        assert_eq!(Expr::int(2) * Expr::int(3), Expr::int(6));
        assert_eq!(Expr::int(1) / Expr::int(3), Expr::ratio(1, 3));
        assert_eq!(Expr::int(2).powi(-2), Expr::ratio(1, 4));
        assert_eq!(-(-&y), y);
        assert_eq!(y.exp().log(), y);
        assert_eq!(Expr::int(9).sqrt(), Expr::int(3));
        assert_eq!(Expr::int(2).sqrt().to_string(), "sqrt(2)");
    }

    #[test]
    fn substitution() {
        let phi = Expr::var("phi");
        let e = phi.powi(2);
        let r = parse("u/y").unwrap();
        assert_eq!(e.substitute("phi", &r), r.powi(2));
        let w = parse("omega+1").unwrap();
        let out = w.substitute("omega", &parse("z/y").unwrap());
        assert_eq!(out, parse("z/y + 1").unwrap());
        let y = Expr::var("y");
        assert_eq!(y.substitute("u", &Expr::int(5)), y);
    }

    #[test]
    fn simultaneous_substitution_does_not_chain() {
        let e = parse("y - z").unwrap();
        assert_eq!(e.swap_yz(), parse("z - y").unwrap());
    }

    #[test]
    fn rational_overflow_falls_back_to_float() {
        let big = Number::int(i64::MAX);
        assert!(matches!(big.add(big), Number::Float(_)));
        assert_eq!(Number::int(3).powi(-1), Some(Number::ratio(1, 3)));
        assert_eq!(Number::int(0).powi(-1), None);
    }
}
