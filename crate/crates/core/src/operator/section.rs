use std::fmt;

use num_complex::Complex64;

use crate::expr::{EvalError, Func, Observable};
use crate::symplectic::{PhasePoint, VectorField};

/// A complex-valued function on phase space, i.e. a section of the trivial
/// line bundle written in the global trivialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub re: Observable,
    pub im: Observable,
}

impl Section {
    pub fn new(re: Observable, im: Observable) -> Self {
        assert_eq!(re.dim(), im.dim(), "real and imaginary parts on different phase spaces");
        Section { re, im }
    }

    pub fn real(re: Observable) -> Self {
        let im = Observable::constant(re.dim(), 0.0);
        Section { re, im }
    }

    pub fn zero(dim: usize) -> Self {
        Section::real(Observable::constant(dim, 0.0))
    }

    pub fn parse(re: &str, im: &str, dim: usize) -> Result<Self, crate::expr::ParseError> {
        Ok(Section::new(Observable::parse(re, dim)?, Observable::parse(im, dim)?))
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn evaluate(&self, z: &PhasePoint) -> Result<Complex64, EvalError> {
        Ok(Complex64::new(self.re.evaluate(z)?, self.im.evaluate(z)?))
    }

    pub fn add(&self, other: &Section) -> Section {
        Section::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Section) -> Section {
        Section::new(&self.re - &other.re, &self.im - &other.im)
    }

    /// Multiplication by a complex constant.
    pub fn scale(&self, c: Complex64) -> Section {
        let re = self.re.scale(c.re) - self.im.scale(c.im);
        let im = self.im.scale(c.re) + self.re.scale(c.im);
        Section::new(re, im)
    }

    /// Multiplication by a real function.
    pub fn mul_observable(&self, f: &Observable) -> Section {
        Section::new(f * &self.re, f * &self.im)
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> Section {
        Section::new(-&self.im, self.re.clone())
    }

    /// The derivation `X(s)`, applied to both parts.
    pub fn derive_along(&self, x: &VectorField) -> Section {
        Section::new(x.apply(&self.re), x.apply(&self.im))
    }

    pub fn simplify(&self) -> Section {
        Section::new(self.re.simplify(), self.im.simplify())
    }

    /// True if every additive term of both parts carries a factor
    /// `exp(g)` with `g` a negative-definite quadratic form, so the section
    /// decays like a Gaussian.
    pub fn has_gaussian_decay(&self) -> bool {
        decays(&self.re) && decays(&self.im)
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i*{}", self.re, self.im)
    }
}

fn decays(f: &Observable) -> bool {
    use crate::expr::{BinOp, Expr};
    fn walk(e: &Expr, dim: usize) -> bool {
        match e {
            Expr::Const(c) => *c == 0.0,
            Expr::Neg(a) => walk(a, dim),
            Expr::Binary(BinOp::Add | BinOp::Sub, a, b) => walk(a, dim) && walk(b, dim),
            Expr::Binary(BinOp::Mul, a, b) => walk(a, dim) || walk(b, dim),
            Expr::Binary(BinOp::Div, a, _) => walk(a, dim),
            Expr::Pow(a, k) => *k > 0 && walk(a, dim),
            Expr::Call(Func::Exp, arg) => {
                negative_definite_quadratic(&Observable::from_expr(dim, (**arg).clone()))
            }
            _ => false,
        }
    }
    walk(f.expr(), f.dim())
}

#[allow(clippy::needless_range_loop)]
fn negative_definite_quadratic(g: &Observable) -> bool {
    let n = g.dim();
    let m = 2 * n;
    let var = |a: usize| {
        if a < n {
            crate::expr::Var::q(a)
        } else {
            crate::expr::Var::p(a - n)
        }
    };
    let probes: [Vec<f64>; 3] = [
        vec![0.0; m],
        (0..m).map(|i| 0.7 + 0.3 * i as f64).collect(),
        (0..m).map(|i| -1.9 + 0.45 * i as f64).collect(),
    ];
    let mut hessian = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in 0..m {
            let second = g.differentiate(var(a)).differentiate(var(b));
            let values: Option<Vec<f64>> = probes.iter().map(|z| second.evaluate_flat(z).ok()).collect();
            let Some(values) = values else { return false };
            if values.iter().any(|v| (v - values[0]).abs() > 1e-12 * values[0].abs().max(1.0)) {
                return false;
            }
            hessian[a][b] = values[0];
        }
    }
    // Negative definite iff -H admits a Cholesky factorization.
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let mut sum = -hessian[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return false;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec(re: &str, im: &str) -> Section {
        Section::parse(re, im, 1).unwrap()
    }

    #[test]
    fn complex_scaling_matches_pointwise_arithmetic() {
        let s = sec("q1^2 - p1", "sin(q1*p1)");
        let c = Complex64::new(0.75, -1.5);
        let lhs = s.scale(c);
        let rhs = s.scale(Complex64::new(c.re, 0.0)).add(&s.times_i().scale(Complex64::new(c.im, 0.0)));
        for (q, p) in [(0.3, 1.0), (-1.2, 0.4), (2.0, -2.0)] {
            let z = PhasePoint::new(vec![q], vec![p]);
            let direct = c * s.evaluate(&z).unwrap();
            let a = lhs.evaluate(&z).unwrap();
            let b = rhs.evaluate(&z).unwrap();
            assert!((a - direct).norm() < 1e-14);
            assert!((b - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn detects_gaussian_decay() {
        assert!(sec("exp(-(q1^2 + p1^2)/2)", "0").has_gaussian_decay());
        assert!(sec("(q1 + 2*p1^2)*exp(-(q1^2 + p1^2)/2)", "q1*exp(-(q1^2 + p1^2 + q1*p1))").has_gaussian_decay());
        assert!(!sec("q1", "0").has_gaussian_decay());
        assert!(!sec("exp(-q1^2)", "0").has_gaussian_decay());
        assert!(!sec("exp((q1^2 + p1^2)/2)", "0").has_gaussian_decay());
        assert!(!sec("exp(-(q1^2 + p1^2)) + 1", "0").has_gaussian_decay());
        assert!(!sec("exp(-(q1^4 + p1^2))", "0").has_gaussian_decay());
    }
}
