use super::{BinOp, Expr, Func, Node};

impl Expr {
    /// Partial derivative with respect to `v`; all other variables are held
    /// fixed. The result is passed through [`Expr::simplify`].
    pub fn differentiate(&self, v: &str) -> Expr {
        self.derive(v).simplify()
    }

    /// Shorthand for repeated partial derivatives, e.g. `d(&["u", "y"])`.
    pub fn d(&self, vars: &[&str]) -> Expr {
        vars.iter().fold(self.clone(), |e, v| e.differentiate(v))
    }

    fn derive(&self, v: &str) -> Expr {
        if !self.contains(v) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Var(s) => {
                if s.as_str() == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Unary(f, a) => {
                let da = a.derive(v);
                let outer = match f {
                    Func::Neg => return -da,
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Exp => a.exp(),
                    Func::Log => return da / a,
                    Func::Sqrt => return da / (Expr::int(2) * a.sqrt()),
                };
                outer * da
            }
            Node::Binary(op, a, b) => match op {
                BinOp::Add => a.derive(v) + b.derive(v),
                BinOp::Sub => a.derive(v) - b.derive(v),
                BinOp::Mul => a.derive(v) * b + a * b.derive(v),
                BinOp::Div => {
                    let (da, db) = (a.derive(v), b.derive(v));
                    if db.is_zero_literal() {
                        da / b
                    } else {
                        (da * b - a * db) / b.powi(2)
                    }
                }
                BinOp::Pow => {
                    if !b.contains(v) {
                        // power rule; valid for negative bases with integer exponents
                        let lowered = b - 1;
                        b * a.pow(&lowered) * a.derive(v)
                    } else if !a.contains(v) {
                        self * a.log() * b.derive(v)
                    } else {
                        self * (b.derive(v) * a.log() + b * a.derive(v) / a)
                    }
                }
            },
        }
    }
}
