#![allow(dead_code)]

use condsym_core::expr::{BinOp, Bindings, Func};
use condsym_core::Expr;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn p(s: &str) -> Expr {
    condsym_core::parse(s).unwrap()
}

fn leaf(vars: &'static [&'static str]) -> BoxedStrategy<Expr> {
    let var = proptest::sample::select(vars).prop_map(Expr::var);
    let int = (1i64..=5).prop_map(Expr::int);
    prop_oneof![3 => var, 1 => int].boxed()
}

/// Random expressions in `vars` built only from operations that are smooth
/// and defined on the whole positive orthant: no bare division or logarithm
/// of a quantity that can vanish.
///
/// Powers apply to variables only, which keeps arguments of `sin`, `cos` and
/// `exp` from becoming steep high-degree polynomials whose third derivatives
/// swamp a central difference.
pub fn smooth_expr(vars: &'static [&'static str]) -> BoxedStrategy<Expr> {
    let base = proptest::sample::select(vars).prop_map(Expr::var);
    leaf(vars)
        .prop_recursive(4, 24, 2, move |inner| {
            let un = |f: Func| inner.clone().prop_map(move |a| Expr::raw_unary(f, a));
            let bin = |op: BinOp| (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expr::raw_binary(op, a, b));
            let one_plus_sq = |a: Expr| Expr::raw_binary(BinOp::Add, Expr::int(1), Expr::raw_binary(BinOp::Pow, a, Expr::int(2)));
            prop_oneof![
                bin(BinOp::Add),
                bin(BinOp::Sub),
                bin(BinOp::Mul),
                (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expr::raw_binary(BinOp::Div, a, one_plus_sq(b))),
                (base.clone(), 2i64..=3).prop_map(|(a, n)| Expr::raw_binary(BinOp::Pow, a, Expr::int(n))),
                un(Func::Sin),
                un(Func::Cos),
                un(Func::Neg),
                inner.clone().prop_map(|a| Expr::raw_unary(Func::Exp, Expr::raw_unary(Func::Sin, a))),
                inner.clone().prop_map(move |a| Expr::raw_unary(Func::Sqrt, one_plus_sq(a))),
                inner.clone().prop_map(move |a| Expr::raw_unary(Func::Log, one_plus_sq(a))),
            ]
        })
        .boxed()
}

pub const YZU: &[&str] = &["y", "z", "u"];
pub const YZ: &[&str] = &["y", "z"];

/// `n` values of `strategy` from a fixed seed.
pub fn draw<T: std::fmt::Debug>(strategy: &BoxedStrategy<T>, n: usize, seed: u8) -> Vec<T> {
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

pub fn bind(point: &[(&str, f64)]) -> Bindings<f64> {
    point.iter().fold(Bindings::new(), |b, &(n, x)| b.with(n, x))
}

/// Worst relative error `|fd − d| / max(1, |d|, |e|)` of `∂e/∂v` against the
/// five-point central difference of width `h`, over `points`; points where
/// anything fails to evaluate are skipped. Returns `(worst, evaluated points)`.
pub fn derivative_error(e: &Expr, v: &str, points: &[Vec<(&str, f64)>], h: f64) -> (f64, usize) {
    let de = e.d(&[v]);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for pt in points {
        let at = |shift: f64| {
            let moved: Vec<(&str, f64)> = pt.iter().map(|&(n, x)| (n, if n == v { x + shift } else { x })).collect();
            e.evaluate(&bind(&moved))
        };
        let (Ok(center), Ok(p1), Ok(m1), Ok(p2), Ok(m2), Ok(exact)) =
            (at(0.0), at(h), at(-h), at(2.0 * h), at(-2.0 * h), de.evaluate(&bind(pt)))
        else {
            continue;
        };
        let fd = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
        let scale = 1f64.max(exact.abs()).max(center.abs());
        worst = worst.max((fd - exact).abs() / scale);
        used += 1;
    }
    (worst, used)
}

/// Fixed pseudo-random points in `[0.5, 2]^3`.
pub fn sample_points(n: usize) -> Vec<Vec<(&'static str, f64)>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    (0..n)
        .map(|_| YZU.iter().map(|&v| (v, rng.gen_range(0.5..2.0))).collect())
        .collect()
}
