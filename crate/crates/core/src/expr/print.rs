//! Printing. `Display` uses minimal parentheses; [`Expr::canonical`] is
//! fully parenthesized. Both forms re-parse to the same tree for parser-built
//! expressions.

use std::fmt::{self, Write};

use super::{BinOp, Expr, Func, Node, Number};

const P_SUM: u8 = 1;
const P_PRODUCT: u8 = 2;
const P_UNARY: u8 = 3;
const P_POWER: u8 = 4;
const P_ATOM: u8 = 5;

fn format_number(n: Number) -> String {
    match n {
        Number::Rational(r) if r.is_integer() => r.numer().to_string(),
        Number::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
        Number::Float(x) => format!("{x:?}"),
    }
}

fn number_precedence(n: Number) -> u8 {
    match n {
        Number::Rational(r) if !r.is_integer() => P_PRODUCT,
        _ if n.is_negative() => P_UNARY,
        _ => P_ATOM,
    }
}

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(n) => number_precedence(*n),
        Node::Var(_) => P_ATOM,
        Node::Unary(Func::Neg, _) => P_UNARY,
        Node::Unary(..) => P_ATOM,
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => P_SUM,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => P_PRODUCT,
        Node::Binary(BinOp::Pow, ..) => P_POWER,
    }
}

fn write_pretty(e: &Expr, min: u8, out: &mut String) {
    if precedence(e) < min {
        out.push('(');
        write_pretty(e, 0, out);
        out.push(')');
        return;
    }
    match e.node() {
        Node::Num(n) => out.push_str(&format_number(*n)),
        Node::Var(s) => out.push_str(s.as_str()),
        Node::Unary(Func::Neg, a) => {
            out.push('-');
            // `-2` would read back as a negative literal
            let literal = a.as_number().is_some_and(|n| !n.is_negative());
            if literal {
                out.push('(');
                write_pretty(a, 0, out);
                out.push(')');
            } else {
                write_pretty(a, P_UNARY, out);
            }
        }
        Node::Unary(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_pretty(a, 0, out);
            out.push(')');
        }
        Node::Binary(op, a, b) => {
            let (left, right) = match op {
                BinOp::Add | BinOp::Sub => (P_SUM, P_SUM + 1),
                BinOp::Mul | BinOp::Div => (P_PRODUCT, P_PRODUCT + 1),
                BinOp::Pow => (P_ATOM, P_UNARY),
            };
            write_pretty(a, left, out);
            match op {
                BinOp::Add | BinOp::Sub => {
                    let _ = write!(out, " {} ", op.symbol());
                }
                _ => out.push(op.symbol()),
            }
            write_pretty(b, right, out);
        }
    }
}

fn write_canonical(e: &Expr, out: &mut String) {
    match e.node() {
        Node::Num(n) => {
            let s = format_number(*n);
            if number_precedence(*n) == P_ATOM {
                out.push_str(&s);
            } else {
                let _ = write!(out, "({s})");
            }
        }
        Node::Var(s) => out.push_str(s.as_str()),
        Node::Unary(Func::Neg, a) => {
            let mut inner = String::new();
            write_canonical(a, &mut inner);
            if inner.starts_with('(') {
                let _ = write!(out, "(-{inner})");
            } else if a.as_number().is_some() {
                let _ = write!(out, "(-({inner}))");
            } else {
                let _ = write!(out, "(-{inner})");
            }
        }
        Node::Unary(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_canonical(a, out);
            out.push(')');
        }
        Node::Binary(op, a, b) => {
            out.push('(');
            write_canonical(a, out);
            out.push(op.symbol());
            write_canonical(b, out);
            out.push(')');
        }
    }
}

impl Expr {
    /// Fully parenthesized form used in machine-readable reports.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        write_canonical(self, &mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_pretty(self, 0, &mut s);
        f.write_str(&s)
    }
}
