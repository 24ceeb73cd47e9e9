//! Terminating rewrite list applied through smart constructors.
//!
//! Every rule is exact in IEEE arithmetic wherever the input is defined:
//! constant folding uses the same operation the evaluator would perform,
//! identities only drop operations that return their operand unchanged, and
//! commutative operands are ordered canonically. No reassociation, no
//! distribution.

use std::cmp::Ordering;
use std::sync::Arc;

use super::ast::{BinOp, Expr, Func};

fn fold(value: f64) -> Option<Expr> {
    value.is_finite().then_some(Expr::Const(value))
}

pub fn constant(value: f64) -> Expr {
    Expr::Const(value)
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => Arc::unwrap_or_clone(inner),
        other => Expr::Neg(Arc::new(other)),
    }
}

fn ordered(a: Expr, b: Expr) -> (Expr, Expr) {
    if a.structural_cmp(&b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Arc::new(a), Arc::new(b))
}

pub fn add(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.constant_value(), b.constant_value()) {
        if let Some(c) = fold(x + y) {
            return c;
        }
    }
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    // x + (-y) == x - y exactly
    if let Expr::Neg(y) = b {
        return sub(a, Arc::unwrap_or_clone(y));
    }
    if let Expr::Neg(y) = a {
        return sub(b, Arc::unwrap_or_clone(y));
    }
    let (a, b) = ordered(a, b);
    binary(BinOp::Add, a, b)
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.constant_value(), b.constant_value()) {
        if let Some(c) = fold(x - y) {
            return c;
        }
    }
    if b.is_zero() {
        return a;
    }
    if a.is_zero() {
        return neg(b);
    }
    if a == b {
        return Expr::Const(0.0);
    }
    if let Expr::Neg(y) = b {
        return add(a, Arc::unwrap_or_clone(y));
    }
    binary(BinOp::Sub, a, b)
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.constant_value(), b.constant_value()) {
        if let Some(c) = fold(x * y) {
            return c;
        }
    }
    if a.is_zero() || b.is_zero() {
        return Expr::Const(0.0);
    }
    if a.is_const(1.0) {
        return b;
    }
    if b.is_const(1.0) {
        return a;
    }
    if a.is_const(-1.0) {
        return neg(b);
    }
    if b.is_const(-1.0) {
        return neg(a);
    }
    // (-x) * y == -(x * y) exactly
    if let Expr::Neg(x) = a {
        return neg(mul(Arc::unwrap_or_clone(x), b));
    }
    if let Expr::Neg(y) = b {
        return neg(mul(a, Arc::unwrap_or_clone(y)));
    }
    let (a, b) = ordered(a, b);
    binary(BinOp::Mul, a, b)
}

pub fn div(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.constant_value(), b.constant_value()) {
        if y != 0.0 {
            if let Some(c) = fold(x / y) {
                return c;
            }
        }
    }
    if b.is_const(1.0) {
        return a;
    }
    if b.is_const(-1.0) {
        return neg(a);
    }
    if a.is_zero() && !b.is_zero() {
        return Expr::Const(0.0);
    }
    binary(BinOp::Div, a, b)
}

pub fn pow(base: Expr, exponent: i32) -> Expr {
    if exponent == 0 {
        return Expr::Const(1.0);
    }
    if exponent == 1 {
        return base;
    }
    if let Some(x) = base.constant_value() {
        if !(x == 0.0 && exponent < 0) {
            if let Some(c) = fold(x.powi(exponent)) {
                return c;
            }
        }
    }
    Expr::Pow(Arc::new(base), exponent)
}

pub fn call(func: Func, arg: Expr) -> Expr {
    if let Some(x) = arg.constant_value() {
        if let Some(c) = func.apply(x).and_then(fold) {
            return c;
        }
    }
    Expr::Call(func, Arc::new(arg))
}

/// Rebuilds `expr` bottom-up through the smart constructors.
pub fn simplify(expr: &Expr) -> Expr {
    match expr {
        Expr::Const(_) | Expr::Pi | Expr::Var(_) => expr.clone(),
        Expr::Neg(a) => neg(simplify(a)),
        Expr::Binary(op, a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match op {
                BinOp::Add => add(a, b),
                BinOp::Sub => sub(a, b),
                BinOp::Mul => mul(a, b),
                BinOp::Div => div(a, b),
            }
        }
        Expr::Pow(a, k) => pow(simplify(a), *k),
        Expr::Call(f, a) => call(*f, simplify(a)),
    }
}
