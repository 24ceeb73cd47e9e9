use thiserror::Error;

use super::ast::{BinOp, Expr, Func, VarKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
    #[error("point has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

fn domain(expr: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain {
        expr: expr.to_string(),
        reason,
    }
}

/// Evaluates `expr` at the phase point given by position and momentum slices.
pub fn eval(expr: &Expr, q: &[f64], p: &[f64]) -> Result<f64, EvalError> {
    let value = match expr {
        Expr::Const(c) => *c,
        Expr::Pi => std::f64::consts::PI,
        Expr::Var(v) => match v.kind {
            VarKind::Q => q[v.index],
            VarKind::P => p[v.index],
        },
        Expr::Neg(a) => -eval(a, q, p)?,
        Expr::Binary(op, a, b) => {
            let x = eval(a, q, p)?;
            let y = eval(b, q, p)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain(expr, "division by zero"));
                    }
                    x / y
                }
            }
        }
        Expr::Pow(a, k) => {
            let x = eval(a, q, p)?;
            if x == 0.0 && *k < 0 {
                return Err(domain(expr, "negative power of zero"));
            }
            x.powi(*k)
        }
        Expr::Call(func, a) => {
            let x = eval(a, q, p)?;
            match func.apply(x) {
                Some(v) => v,
                None if *func == Func::Ln => return Err(domain(expr, "logarithm of a non-positive value")),
                None => return Err(domain(expr, "square root of a negative value")),
            }
        }
    };
    if value.is_nan() {
        return Err(domain(expr, "result is not a number"));
    }
    Ok(value)
}
