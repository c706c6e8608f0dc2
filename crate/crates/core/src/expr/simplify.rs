//! Local normalization: flattens sums and products, folds constants,
//! collects like terms and like factors. No expansion of products of sums
//! beyond distributing a numeric coefficient.

use super::{BinOp, Expr, Func, Node, Number};

#[derive(Clone, Debug)]
struct Term {
    coeff: Number,
    /// (base, exponent), sorted by base, bases distinct, no zero exponents.
    factors: Vec<(Expr, Expr)>,
}

impl Expr {
    pub fn simplify(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Var(_) => self.clone(),
            Node::Unary(Func::Neg, _) | Node::Binary(..) => {
                let mut terms = Vec::new();
                gather_sum(self, Number::int(1), &mut terms);
                build_sum(terms)
            }
            Node::Unary(f, a) => a.simplify().apply(*f),
        }
    }
}

fn is_product_shaped(e: &Expr) -> bool {
    matches!(
        e.node(),
        Node::Num(_)
            | Node::Unary(Func::Neg, _)
            | Node::Binary(BinOp::Mul | BinOp::Div | BinOp::Pow, ..)
    )
}

fn is_sum(e: &Expr) -> bool {
    matches!(
        e.node(),
        Node::Binary(BinOp::Add | BinOp::Sub, ..) | Node::Unary(Func::Neg, _)
    )
}

fn gather_sum(e: &Expr, sign: Number, out: &mut Vec<Term>) {
    match e.node() {
        Node::Binary(BinOp::Add, a, b) => {
            gather_sum(a, sign, out);
            gather_sum(b, sign, out);
        }
        Node::Binary(BinOp::Sub, a, b) => {
            gather_sum(a, sign, out);
            gather_sum(b, sign.neg(), out);
        }
        Node::Unary(Func::Neg, a) => gather_sum(a, sign.neg(), out),
        _ => {
            let mut t = monomial(e, false);
            t.coeff = t.coeff.mul(sign);
            if t.coeff.is_zero() {
                return;
            }
            // c * (a + b) is spread over the outer sum
            if t.factors.len() == 1 && t.factors[0].1.is_one_literal() && is_sum(&t.factors[0].0) {
                let inner = t.factors.pop().expect("one factor").0;
                gather_sum(&inner, t.coeff, out);
                return;
            }
            out.push(t);
        }
    }
}

fn build_sum(mut terms: Vec<Term>) -> Expr {
    terms.sort_by(|a, b| a.factors.cmp(&b.factors));
    let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.factors == t.factors => last.coeff = last.coeff.add(t.coeff),
            _ => merged.push(t),
        }
    }
    merged.retain(|t| !t.coeff.is_zero());
    // constants go last
    let (mut vars, consts): (Vec<Term>, Vec<Term>) =
        merged.into_iter().partition(|t| !t.factors.is_empty());
    vars.extend(consts);

    let mut iter = vars.into_iter();
    let Some(first) = iter.next() else {
        return Expr::zero();
    };
    let mut acc = build_term(&first);
    for t in iter {
        if t.coeff.is_negative() {
            let pos = Term {
                coeff: t.coeff.neg(),
                factors: t.factors,
            };
            acc = Expr::raw_binary(BinOp::Sub, acc, build_term(&pos));
        } else {
            acc = Expr::raw_binary(BinOp::Add, acc, build_term(&t));
        }
    }
    acc
}

fn monomial(e: &Expr, simplified: bool) -> Term {
    let mut coeff = Number::int(1);
    let mut factors = Vec::new();
    gather_product(e, 1, simplified, &mut coeff, &mut factors);
    combine_factors(coeff, factors)
}

fn gather_product(
    e: &Expr,
    mult: i64,
    simplified: bool,
    coeff: &mut Number,
    factors: &mut Vec<(Expr, Expr)>,
) {
    match e.node() {
        Node::Num(n) => match n.powi(mult) {
            Some(v) => *coeff = coeff.mul(v),
            None => factors.push((e.clone(), Expr::int(mult))),
        },
        Node::Binary(BinOp::Mul, a, b) => {
            gather_product(a, mult, simplified, coeff, factors);
            gather_product(b, mult, simplified, coeff, factors);
        }
        Node::Binary(BinOp::Div, a, b) => {
            gather_product(a, mult, simplified, coeff, factors);
            gather_product(b, -mult, simplified, coeff, factors);
        }
        Node::Unary(Func::Neg, a) => {
            if mult % 2 != 0 {
                *coeff = coeff.neg();
            }
            gather_product(a, mult, simplified, coeff, factors);
        }
        Node::Binary(BinOp::Pow, a, b) => {
            let exponent = if simplified { b.clone() } else { b.simplify() };
            let int_exp = exponent
                .as_number()
                .and_then(Number::as_integer)
                .and_then(|n| n.checked_mul(mult))
                .filter(|n| n.unsigned_abs() <= 1 << 20);
            match int_exp {
                Some(n) => gather_product(a, n, simplified, coeff, factors),
                None => {
                    let base = if simplified { a.clone() } else { a.simplify() };
                    let scaled = scale_exponent(&exponent, mult);
                    let folded = base.pow(&scaled);
                    match folded.node() {
                        Node::Binary(BinOp::Pow, ..) => factors.push((base, scaled)),
                        _ => gather_product(&folded, 1, true, coeff, factors),
                    }
                }
            }
        }
        _ => {
            if simplified {
                factors.push((e.clone(), Expr::int(mult)));
                return;
            }
            let s = e.simplify();
            if is_product_shaped(&s) {
                gather_product(&s, mult, true, coeff, factors);
            } else {
                factors.push((s, Expr::int(mult)));
            }
        }
    }
}

fn scale_exponent(exponent: &Expr, mult: i64) -> Expr {
    if mult == 1 {
        return exponent.clone();
    }
    match exponent.as_number() {
        Some(n) => Expr::number(n.mul(Number::int(mult))),
        None => (Expr::int(mult) * exponent).simplify(),
    }
}

fn add_exponents(a: &Expr, b: &Expr) -> Expr {
    match (a.as_number(), b.as_number()) {
        (Some(x), Some(y)) => Expr::number(x.add(y)),
        _ => (a + b).simplify(),
    }
}

fn combine_factors(mut coeff: Number, mut factors: Vec<(Expr, Expr)>) -> Term {
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(Expr, Expr)> = Vec::with_capacity(factors.len());
    for (base, exp) in factors {
        match merged.last_mut() {
            Some(last) if last.0 == base => last.1 = add_exponents(&last.1, &exp),
            _ => merged.push((base, exp)),
        }
    }
    let mut out = Vec::with_capacity(merged.len());
    for (base, exp) in merged {
        if exp.is_zero_literal() || base.is_one_literal() {
            continue;
        }
        if let (Some(b), Some(n)) = (base.as_number(), exp.as_number().and_then(Number::as_integer)) {
            if let Some(v) = b.powi(n) {
                coeff = coeff.mul(v);
                continue;
            }
        }
        if base.is_zero_literal() && exp.as_number().is_some_and(|n| !n.is_negative()) {
            coeff = Number::int(0);
            continue;
        }
        out.push((base, exp));
    }
    if coeff.is_zero() {
        out.clear();
    }
    Term { coeff, factors: out }
}

fn factor_expr(base: &Expr, exp: &Expr) -> Expr {
    if exp.is_one_literal() {
        base.clone()
    } else {
        Expr::raw_binary(BinOp::Pow, base.clone(), exp.clone())
    }
}

fn product(parts: Vec<Expr>) -> Option<Expr> {
    parts
        .into_iter()
        .reduce(|acc, e| Expr::raw_binary(BinOp::Mul, acc, e))
}

fn build_term(t: &Term) -> Expr {
    if t.coeff.is_zero() {
        return Expr::zero();
    }
    if t.factors.is_empty() {
        return Expr::number(t.coeff);
    }
    let negative = t.coeff.is_negative();
    let magnitude = if negative { t.coeff.neg() } else { t.coeff };
    let (top, bottom) = match magnitude {
        Number::Rational(r) => (Number::int(*r.numer()), Number::int(*r.denom())),
        Number::Float(_) => (magnitude, Number::int(1)),
    };

    let mut num = Vec::new();
    let mut den = Vec::new();
    if !top.is_one() {
        let lead = if negative && !top.neg().is_one() {
            top.neg()
        } else {
            top
        };
        num.push(Expr::number(lead));
    }
    if !bottom.is_one() {
        den.push(Expr::number(bottom));
    }
    for (base, exp) in &t.factors {
        match exp.as_number() {
            Some(n) if n.is_negative() => den.push(factor_expr(base, &Expr::number(n.neg()))),
            _ => num.push(factor_expr(base, exp)),
        }
    }
    let numerator = product(num).unwrap_or_else(Expr::one);
    let body = match product(den) {
        Some(d) => Expr::raw_binary(BinOp::Div, numerator, d),
        None => numerator,
    };
    let sign_in_literal = negative && !top.is_one();
    if negative && !sign_in_literal {
        Expr::raw_unary(Func::Neg, body)
    } else {
        body
    }
}
