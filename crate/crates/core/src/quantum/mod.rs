//! Finite-dimensional Schrödinger dynamics on the unit sphere of `C^d`.
//!
//! The sign convention is `𝕙ψ = −iħ ∂_t ψ`, i.e. the Schrödinger field is
//! `X_H(ψ) = (i/ħ)𝕙ψ` and the propagator `U(t) = exp(+it𝕙/ħ)`. The sign is
//! isolated in [`SCHRODINGER_SIGN`]; every invariant checked here holds for
//! either choice.

mod jacobi;
mod matrix;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub use jacobi::{jacobi_eigh, Eigendecomposition, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE};
pub use matrix::{ComplexMatrix, HermitianMatrix, HERMITIAN_TOLERANCE};

/// `+1` gives `U(t) = exp(+it𝕙/ħ)`; `−1` the more common `exp(−it𝕙/ħ)`.
pub const SCHRODINGER_SIGN: f64 = 1.0;

/// How far from 1 a norm may be for a state to count as a unit vector.
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not square ({rows} rows, a row of length {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty matrix or state")]
    Empty,
    #[error("non-finite entry")]
    NonFinite,
    #[error("state is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("Planck constant must be positive and finite, got {0}")]
    InvalidHbar(f64),
}

/// A vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<Complex64>);

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amplitudes.is_empty() {
            return Err(QuantumError::Empty);
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        Ok(StateVector(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, QuantumError> {
        Self::new(amplitudes.iter().map(|x| Complex64::new(*x, 0.0)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self, QuantumError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(QuantumError::NotUnit { norm: 0.0 });
        }
        Ok(StateVector(self.0.iter().map(|z| z / n).collect()))
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }

    /// `⟨self, other⟩ = Σ conj(self_i) other_i`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: Complex64) -> StateVector {
        StateVector(self.0.iter().map(|z| z * c).collect())
    }
}

fn check_hbar(hbar: f64) -> Result<(), QuantumError> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(QuantumError::InvalidHbar(hbar))
    }
}

fn check_dims(m: &ComplexMatrix, psi: &StateVector) -> Result<(), QuantumError> {
    if m.dim() != psi.dim() {
        return Err(QuantumError::DimMismatch {
            expected: m.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

fn check_unit(psi: &StateVector) -> Result<(), QuantumError> {
    if psi.is_unit() {
        Ok(())
    } else {
        Err(QuantumError::NotUnit { norm: psi.norm() })
    }
}

/// `X_H(ψ) = (i/ħ)𝕙ψ`. Accepts any square matrix so the tangency check can
/// be demonstrated on non-Hermitian generators.
pub fn schrodinger_field(h: impl AsRef<ComplexMatrix>, psi: &StateVector, hbar: f64) -> Result<Vec<Complex64>, QuantumError> {
    let m = h.as_ref();
    check_dims(m, psi)?;
    check_hbar(hbar)?;
    let factor = Complex64::new(0.0, SCHRODINGER_SIGN / hbar);
    Ok(m.apply(psi.amplitudes()).into_iter().map(|z| z * factor).collect())
}

/// `|Re⟨ψ, X_H(ψ)⟩|`, zero iff the field is tangent to the unit sphere at ψ.
pub fn tangency_defect(h: impl AsRef<ComplexMatrix>, psi: &StateVector, hbar: f64) -> Result<f64, QuantumError> {
    let field = schrodinger_field(h, psi, hbar)?;
    let pairing: Complex64 = psi.amplitudes().iter().zip(&field).map(|(a, b)| a.conj() * b).sum();
    Ok(pairing.re.abs())
}

/// `U(t) = V diag(exp(±itλ/ħ)) V†`; exactly the identity at `t = 0`.
pub fn propagator(h: &HermitianMatrix, t: f64, hbar: f64) -> Result<ComplexMatrix, QuantumError> {
    check_hbar(hbar)?;
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    let eig = jacobi_eigh(h)?;
    Ok(propagator_from(&eig, t, hbar))
}

fn propagator_from(eig: &Eigendecomposition, t: f64, hbar: f64) -> ComplexMatrix {
    let n = eig.values.len();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|l| Complex64::from_polar(1.0, SCHRODINGER_SIGN * t * l / hbar))
        .collect();
    let v = &eig.vectors;
    let mut u = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] = (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum();
        }
    }
    u
}

/// `ψ(t) = U(t)ψ0` for a unit `ψ0`.
pub fn propagate(h: &HermitianMatrix, psi0: &StateVector, t: f64, hbar: f64) -> Result<StateVector, QuantumError> {
    check_dims(h.matrix(), psi0)?;
    check_unit(psi0)?;
    check_hbar(hbar)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let u = propagator(h, t, hbar)?;
    Ok(StateVector(u.apply(psi0.amplitudes())))
}

/// Propagates to each of `times`, sharing one eigendecomposition.
pub fn propagate_many(h: &HermitianMatrix, psi0: &StateVector, times: &[f64], hbar: f64) -> Result<Vec<StateVector>, QuantumError> {
    check_dims(h.matrix(), psi0)?;
    check_unit(psi0)?;
    check_hbar(hbar)?;
    let eig = jacobi_eigh(h)?;
    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                psi0.clone()
            } else {
                StateVector(propagator_from(&eig, t, hbar).apply(psi0.amplitudes()))
            }
        })
        .collect())
}

/// `min_θ ‖ψ − e^{iθ}φ‖`, which for unit vectors equals
/// `sqrt(max(0, 2 − 2|⟨ψ, φ⟩|))`. The norm is evaluated at the minimizing
/// phase `e^{iθ} = ⟨φ, ψ⟩/|⟨φ, ψ⟩|` instead of through the closed form,
/// whose cancellation near `|⟨ψ, φ⟩| = 1` leaves a floor of about `1e-8`.
pub fn projective_distance(psi: &StateVector, phi: &StateVector) -> f64 {
    let overlap = phi.inner(psi);
    let r = overlap.norm();
    let phase = if r == 0.0 { Complex64::new(1.0, 0.0) } else { overlap / r };
    psi.amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖U(t)†U(t) − I‖_max`.
pub fn unitarity_defect(h: &HermitianMatrix, t: f64, hbar: f64) -> Result<f64, QuantumError> {
    let u = propagator(h, t, hbar)?;
    Ok(u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(h.dim())))
}

/// `Re⟨ψ, 𝕙ψ⟩`.
pub fn energy_expectation(h: &HermitianMatrix, psi: &StateVector) -> Result<f64, QuantumError> {
    check_dims(h.matrix(), psi)?;
    let hpsi = StateVector(h.matrix().apply(psi.amplitudes()));
    Ok(psi.inner(&hpsi).re)
}

/// Hermitian matrix with entries uniform in the unit square.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(m).expect("constructed Hermitian")
}

pub fn random_unit_state(dim: usize, rng: &mut impl Rng) -> StateVector {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let s = StateVector(v);
        if s.norm() > 1e-3 {
            return s.normalized().expect("non-zero norm");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_z() -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn field_examples() {
        let psi = StateVector::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(schrodinger_field(HermitianMatrix::zeros(2), &psi, 1.0).unwrap(), vec![c(0.0, 0.0); 2]);
        assert_eq!(schrodinger_field(sigma_z(), &psi, 1.0).unwrap(), vec![c(0.0, 1.0), c(0.0, 0.0)]);
        let phi = StateVector::new(vec![c(0.3, 0.4), c(-0.5, 0.1)]).unwrap();
        let f = schrodinger_field(HermitianMatrix::identity(2), &phi, 2.0).unwrap();
        assert_eq!(f, phi.scale(c(0.0, 0.5)).amplitudes().to_vec());
        let wrong = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(schrodinger_field(sigma_z(), &wrong, 1.0), Err(QuantumError::DimMismatch { .. })));
    }

    #[test]
    fn propagate_examples() {
        let psi0 = StateVector::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(propagate(&sigma_z(), &psi0, 0.0, 1.0).unwrap(), psi0);
        let t = 0.8;
        let out = propagate(&sigma_z(), &psi0, t, 1.0).unwrap();
        assert!((out.amplitudes()[0] - Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert_eq!(out.amplitudes()[1], c(0.0, 0.0));

        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let out = propagate(&sigma_z(), &plus, PI, 1.0).unwrap();
        for (a, b) in out.amplitudes().iter().zip(plus.amplitudes()) {
            assert!((a + b).norm() < 1e-15);
        }
        assert!(projective_distance(&out, &plus) < 1e-12);
        let not_unit = StateVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(propagate(&sigma_z(), &not_unit, 1.0, 1.0), Err(QuantumError::NotUnit { .. })));
    }

    #[test]
    fn tangency_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(5, &mut rng);
        let psi = random_unit_state(5, &mut rng);
        assert!(tangency_defect(&h, &psi, 0.7).unwrap() < 1e-12);
        assert!(tangency_defect(HermitianMatrix::identity(5), &psi, 1.0).unwrap() < 1e-15);

        let nilpotent =
            ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let e1 = StateVector::basis(2, 0);
        let e2 = StateVector::basis(2, 1);
        assert_eq!(tangency_defect(&nilpotent, &e1, 1.0).unwrap(), 0.0);
        assert_eq!(tangency_defect(&nilpotent, &e2, 1.0).unwrap(), 0.0);
        // ⟨ψ, i M ψ⟩ = i ψ̄₁ψ₂ is purely imaginary for real ψ, so a complex
        // relative phase is needed to expose the non-tangency.
        let real_plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!(tangency_defect(&nilpotent, &real_plus, 1.0).unwrap() < 1e-16);
        let phased = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        assert!((tangency_defect(&nilpotent, &phased, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projective_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_unit_state(4, &mut rng);
        let rotated = psi.scale(Complex64::from_polar(1.0, 2.1));
        assert!(projective_distance(&psi, &rotated) < 1e-12);
        let e1 = StateVector::basis(2, 0);
        let e2 = StateVector::basis(2, 1);
        assert!((projective_distance(&e1, &e2) - 2f64.sqrt()).abs() < 1e-15);
        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((projective_distance(&e1, &plus) - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unitarity_and_group_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(8, &mut rng);
        assert_eq!(unitarity_defect(&h, 0.0, 1.0).unwrap(), 0.0);
        assert!(unitarity_defect(&h, 10.0, 1.0).unwrap() < 1e-12);
        let (t, s) = (0.37, 1.9);
        let lhs = propagator(&h, t + s, 1.0).unwrap();
        let rhs = propagator(&h, t, 1.0).unwrap().matmul(&propagator(&h, s, 1.0).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-11);
    }
}
