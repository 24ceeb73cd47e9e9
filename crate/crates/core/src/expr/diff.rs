use super::ast::{BinOp, Expr, Func, Var};
use super::simplify::{add, call, constant, div, mul, neg, pow, sub};

/// Exact symbolic partial derivative. The result is built through the
/// simplifying constructors, so it comes out already simplified.
pub fn derivative(expr: &Expr, var: Var) -> Expr {
    match expr {
        Expr::Const(_) | Expr::Pi => constant(0.0),
        Expr::Var(v) => constant(if *v == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(derivative(a, var)),
        Expr::Binary(op, a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b), mul(a, db)),
                // (a/b)' = a'/b - a b'/b^2
                BinOp::Div => sub(div(da, b.clone()), div(mul(a, db), pow(b, 2))),
            }
        }
        Expr::Pow(a, k) => {
            let da = derivative(a, var);
            mul(mul(constant(f64::from(*k)), pow((**a).clone(), k - 1)), da)
        }
        Expr::Call(func, a) => {
            let da = derivative(a, var);
            if da.is_zero() {
                return constant(0.0);
            }
            let a = (**a).clone();
            let outer = match func {
                Func::Sin => call(Func::Cos, a),
                Func::Cos => neg(call(Func::Sin, a)),
                Func::Exp => call(Func::Exp, a),
                Func::Sqrt => return div(da, mul(constant(2.0), call(Func::Sqrt, a))),
                Func::Ln => return div(da, a),
            };
            mul(outer, da)
        }
    }
}
