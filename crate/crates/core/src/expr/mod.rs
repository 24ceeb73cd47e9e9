//! Observables: parsed real-valued expressions over `q1..qn, p1..pn`.
//!
//! An [`Observable`] pairs an expression tree with the number of degrees of
//! freedom it lives on. Differentiation is symbolic and exact; the simplifier
//! only performs rewrites that leave every defined evaluation bit-identical.

mod ast;
mod diff;
mod eval;
mod parse;
pub mod simplify;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use ast::{BinOp, Expr, Func, Var, VarKind};
pub use eval::EvalError;
pub use parse::ParseError;

use crate::symplectic::PhasePoint;

/// A smooth function on phase space with `dim` degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    dim: usize,
    expr: Expr,
}

impl Observable {
    /// Parses `text`; variables must be `q1..qn` / `p1..pn` with `n = dim`.
    pub fn parse(text: &str, dim: usize) -> Result<Self, ParseError> {
        Ok(Observable {
            dim,
            expr: parse::parse_expr(text, dim)?,
        })
    }

    /// Wraps an existing tree. Panics if a variable index is out of range.
    pub fn from_expr(dim: usize, expr: Expr) -> Self {
        expr.for_each_var(&mut |v| {
            assert!(v.index < dim, "variable {} outside dimension {}", v, dim)
        });
        Observable { dim, expr }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Observable {
            dim,
            expr: Expr::Const(value),
        }
    }

    pub fn var(dim: usize, var: Var) -> Self {
        Self::from_expr(dim, Expr::Var(var))
    }

    /// Position coordinate `q_{index+1}`.
    pub fn q(dim: usize, index: usize) -> Self {
        Self::var(dim, Var::q(index))
    }

    /// Momentum coordinate `p_{index+1}`.
    pub fn p(dim: usize, index: usize) -> Self {
        Self::var(dim, Var::p(index))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.expr.constant_value()
    }

    pub fn evaluate(&self, z: &PhasePoint) -> Result<f64, EvalError> {
        if z.dim() != self.dim {
            return Err(EvalError::Dimension {
                expected: self.dim,
                found: z.dim(),
            });
        }
        eval::eval(&self.expr, &z.q, &z.p)
    }

    /// Evaluates at a flat `(q1..qn, p1..pn)` slice.
    pub fn evaluate_flat(&self, state: &[f64]) -> Result<f64, EvalError> {
        if state.len() != 2 * self.dim {
            return Err(EvalError::Dimension {
                expected: 2 * self.dim,
                found: state.len(),
            });
        }
        let (q, p) = state.split_at(self.dim);
        eval::eval(&self.expr, q, p)
    }

    pub fn differentiate(&self, var: Var) -> Self {
        assert!(var.index < self.dim, "variable {} outside dimension {}", var, self.dim);
        Observable {
            dim: self.dim,
            expr: diff::derivative(&self.expr, var),
        }
    }

    pub fn d_dq(&self, index: usize) -> Self {
        self.differentiate(Var::q(index))
    }

    pub fn d_dp(&self, index: usize) -> Self {
        self.differentiate(Var::p(index))
    }

    pub fn simplify(&self) -> Self {
        Observable {
            dim: self.dim,
            expr: simplify::simplify(&self.expr),
        }
    }

    pub fn powi(&self, exponent: i32) -> Self {
        Observable {
            dim: self.dim,
            expr: simplify::pow(self.expr.clone(), exponent),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Observable::constant(self.dim, factor) * self
    }

    pub fn call(&self, func: Func) -> Self {
        Observable {
            dim: self.dim,
            expr: simplify::call(func, self.expr.clone()),
        }
    }

    pub fn div(&self, rhs: &Observable) -> Self {
        self.combine(rhs, simplify::div)
    }

    /// True if the expression mentions any position variable.
    pub fn depends_on_q(&self) -> bool {
        self.expr.contains_kind(VarKind::Q)
    }

    pub fn depends_on_p(&self) -> bool {
        self.expr.contains_kind(VarKind::P)
    }

    fn combine(&self, rhs: &Observable, op: fn(Expr, Expr) -> Expr) -> Self {
        assert_eq!(self.dim, rhs.dim, "observables live on different phase spaces");
        Observable {
            dim: self.dim,
            expr: op(self.expr.clone(), rhs.expr.clone()),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $ctor:path) => {
        impl $tr<&Observable> for &Observable {
            type Output = Observable;
            fn $method(self, rhs: &Observable) -> Observable {
                self.combine(rhs, $ctor)
            }
        }
        impl $tr<Observable> for Observable {
            type Output = Observable;
            fn $method(self, rhs: Observable) -> Observable {
                self.combine(&rhs, $ctor)
            }
        }
        impl $tr<&Observable> for Observable {
            type Output = Observable;
            fn $method(self, rhs: &Observable) -> Observable {
                self.combine(rhs, $ctor)
            }
        }
        impl $tr<Observable> for &Observable {
            type Output = Observable;
            fn $method(self, rhs: Observable) -> Observable {
                self.combine(&rhs, $ctor)
            }
        }
    };
}

forward_binop!(Add, add, simplify::add);
forward_binop!(Sub, sub, simplify::sub);
forward_binop!(Mul, mul, simplify::mul);

impl Neg for Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        Observable {
            dim: self.dim,
            expr: simplify::neg(self.expr),
        }
    }
}

impl Neg for &Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        -self.clone()
    }
}
