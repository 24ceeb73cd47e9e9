//! The prequantization map `f ↦ Ω(f)` acting on sections of the trivial
//! line bundle.
//!
//! In the global trivialization the connection with curvature ω0 is
//! `∇_X s = X(s) − (i/ħ) θ0(X) s` with `θ0 = p·dq`, and
//!
//! ```text
//! Ω(f) s = −iħ ∇_{X_f} s + f s.
//! ```
//!
//! This satisfies `Ω({f, g}) = (i/ħ)[Ω(f), Ω(g)]` for the ω-bracket and
//! `Ω(1) = I`. With `ħ = 1/2π` the rescaled operator `(i/ħ) Ω(f)` is the
//! `∇_{X_f} + 2πi f` normalization. All compositions stay symbolic, so
//! commutators are exact and residuals only measure roundoff.

mod quadrature;
mod section;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub use quadrature::simpson_weights;
pub use section::Section;

use crate::expr::{EvalError, Observable};
use crate::symplectic::{hamiltonian_vector_field, poisson_bracket, HamiltonianField, PhasePoint, VectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Planck constant must be positive and finite, got {0}")]
    InvalidHbar(f64),
    #[error("Simpson's rule needs an odd number of grid points, got {0}")]
    EvenGrid(usize),
    #[error("section `{0}` has no Gaussian decay factor")]
    NonDecayingSection(String),
    #[error("operation requires dimension {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("box half-width must be positive, got {0}")]
    InvalidBox(f64),
}

/// `θ0(X) = Σ p_i X^{q_i}`.
pub fn potential_on(x: &VectorField) -> Observable {
    let n = x.dim();
    (0..n).fold(Observable::constant(n, 0.0), |acc, i| acc + Observable::p(n, i) * &x.dq[i])
}

fn check_hbar(hbar: f64) -> Result<(), OperatorError> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(OperatorError::InvalidHbar(hbar))
    }
}

/// `∇_X s = X(s) − (i/ħ) θ0(X) s`.
pub fn covariant_derivative(x: &VectorField, s: &Section, hbar: f64) -> Section {
    assert_eq!(x.dim(), s.dim(), "field and section on different phase spaces");
    let coupling = potential_on(x).scale(1.0 / hbar);
    let gauge = s.mul_observable(&coupling).times_i();
    s.derive_along(x).sub(&gauge).simplify()
}

/// `Ω(f)` for a fixed generator and Planck constant.
#[derive(Debug, Clone)]
pub struct PrequantumOperator {
    field: HamiltonianField,
    hbar: f64,
}

impl PrequantumOperator {
    pub fn new(generator: &Observable, hbar: f64) -> Result<Self, OperatorError> {
        check_hbar(hbar)?;
        Ok(PrequantumOperator {
            field: hamiltonian_vector_field(generator),
            hbar,
        })
    }

    pub fn generator(&self) -> &Observable {
        &self.field.generator
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// The derivative part `−iħ ∇_{X_f} s`.
    pub fn connection_term(&self, s: &Section) -> Section {
        covariant_derivative(&self.field, s, self.hbar).scale(Complex64::new(0.0, -self.hbar))
    }

    /// The multiplication part `f s`.
    pub fn multiplication_term(&self, s: &Section) -> Section {
        s.mul_observable(self.generator())
    }

    /// `Ω(f) s`, evaluated as `−iħ X_f(s) + (f − θ0(X_f)) s` so that the
    /// potential cancels symbolically whenever it does algebraically.
    pub fn apply(&self, s: &Section) -> Section {
        let multiplier = self.generator() - potential_on(&self.field);
        s.derive_along(&self.field)
            .scale(Complex64::new(0.0, -self.hbar))
            .add(&s.mul_observable(&multiplier))
            .simplify()
    }
}

pub fn apply_prequantum(op: &PrequantumOperator, s: &Section) -> Section {
    op.apply(s)
}

/// Both sides of the Dirac condition applied to `s`: `Ω({f,g}) s` and
/// `(i/ħ)(Ω(f)Ω(g) − Ω(g)Ω(f)) s`.
pub fn dirac_sides(f: &Observable, g: &Observable, s: &Section, hbar: f64) -> Result<(Section, Section), OperatorError> {
    let of = PrequantumOperator::new(f, hbar)?;
    let og = PrequantumOperator::new(g, hbar)?;
    let obracket = PrequantumOperator::new(&poisson_bracket(f, g), hbar)?;
    let left = obracket.apply(s);
    let commutator = of.apply(&og.apply(s)).sub(&og.apply(&of.apply(s)));
    let right = commutator.scale(Complex64::new(0.0, 1.0 / hbar)).simplify();
    Ok((left, right))
}

/// `max_z |Ω({f,g}) s − (i/ħ)[Ω(f), Ω(g)] s|` over `points`.
pub fn dirac_residual(
    f: &Observable,
    g: &Observable,
    s: &Section,
    points: &[PhasePoint],
    hbar: f64,
) -> Result<f64, OperatorError> {
    let (left, right) = dirac_sides(f, g, s, hbar)?;
    max_difference(&left, &right, points)
}

/// `max_z |a(z) − b(z)|`.
pub fn max_difference(a: &Section, b: &Section, points: &[PhasePoint]) -> Result<f64, OperatorError> {
    let mut worst = 0.0_f64;
    for z in points {
        worst = worst.max((a.evaluate(z)? - b.evaluate(z)?).norm());
    }
    Ok(worst)
}

/// Planck constant for which `(i/ħ)Ω(f) = ∇_{X_f} + 2πi f` (with `h = 1`).
pub const UNIT_PLANCK_HBAR: f64 = 1.0 / (2.0 * PI);

/// Termwise comparison of `(i/ħ)Ω(f)s` at `ħ = 1/2π` against
/// `∇_{X_f}s + 2πi f s`: returns the larger of the derivative-term and the
/// multiplication-term discrepancies over `points`.
pub fn normalization_defect(f: &Observable, s: &Section, points: &[PhasePoint]) -> Result<f64, OperatorError> {
    let op = PrequantumOperator::new(f, UNIT_PLANCK_HBAR)?;
    let rescale = Complex64::new(0.0, 1.0 / UNIT_PLANCK_HBAR);
    let ours_derivative = op.connection_term(s).scale(rescale);
    let ours_multiplication = op.multiplication_term(s).scale(rescale);

    let xf = hamiltonian_vector_field(f);
    let theirs_derivative = covariant_derivative(&xf, s, UNIT_PLANCK_HBAR);
    let theirs_multiplication = s.mul_observable(f).scale(Complex64::new(0.0, 2.0 * PI));

    let d1 = max_difference(&ours_derivative, &theirs_derivative, points)?;
    let d2 = max_difference(&ours_multiplication, &theirs_multiplication, points)?;
    Ok(d1.max(d2))
}

/// `⟨a, b⟩ = ∫ conj(a) b dq dp` on `[−L, L]²` by tensor-product Simpson.
pub fn inner_product(a: &Section, b: &Section, half_width: f64, m: usize) -> Result<Complex64, OperatorError> {
    if a.dim() != 1 || b.dim() != 1 {
        return Err(OperatorError::Dimension {
            expected: 1,
            found: a.dim().max(b.dim()),
        });
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(OperatorError::InvalidBox(half_width));
    }
    let weights = simpson_weights(m, 2.0 * half_width).ok_or(OperatorError::EvenGrid(m))?;
    let h = 2.0 * half_width / (m - 1) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, wq) in weights.iter().enumerate() {
        let q = -half_width + i as f64 * h;
        let mut row = Complex64::new(0.0, 0.0);
        for (j, wp) in weights.iter().enumerate() {
            let z = PhasePoint::new(vec![q], vec![-half_width + j as f64 * h]);
            row += a.evaluate(&z)?.conj() * b.evaluate(&z)? * *wp;
        }
        total += row * *wq;
    }
    Ok(total)
}

/// `|⟨Ω(f)s1, s2⟩ − ⟨s1, Ω(f)s2⟩|` on a `m × m` Simpson grid over
/// `[−L, L]²`. One degree of freedom, Gaussian-decaying sections only.
pub fn symmetry_defect(
    f: &Observable,
    s1: &Section,
    s2: &Section,
    half_width: f64,
    m: usize,
    hbar: f64,
) -> Result<f64, OperatorError> {
    for s in [s1, s2] {
        if s.dim() != 1 {
            return Err(OperatorError::Dimension {
                expected: 1,
                found: s.dim(),
            });
        }
        if !s.has_gaussian_decay() {
            return Err(OperatorError::NonDecayingSection(s.to_string()));
        }
    }
    if f.dim() != 1 {
        return Err(OperatorError::Dimension {
            expected: 1,
            found: f.dim(),
        });
    }
    if m.is_multiple_of(2) || m < 3 {
        return Err(OperatorError::EvenGrid(m));
    }
    let op = PrequantumOperator::new(f, hbar)?;
    let lhs = inner_product(&op.apply(s1), s2, half_width, m)?;
    let rhs = inner_product(s1, &op.apply(s2), half_width, m)?;
    Ok((lhs - rhs).norm())
}
