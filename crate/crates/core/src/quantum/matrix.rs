use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::QuantumError;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, QuantumError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(QuantumError::Empty);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(QuantumError::NotSquare { rows: dim, cols: bad.len() });
        }
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        Ok(ComplexMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `max_ij |a_ij − b_ij|`
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// A validated self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `|m_ij − conj(m_ji)| ≤ 1e-12` everywhere, then stores
    /// the exactly Hermitian part `(m + m†)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self, QuantumError> {
        let deviation = m.hermitian_deviation();
        if deviation > HERMITIAN_TOLERANCE {
            return Err(QuantumError::NotHermitian { deviation });
        }
        let n = m.dim();
        let mut sym = m.clone();
        for i in 0..n {
            sym[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                sym[(i, j)] = avg;
                sym[(j, i)] = avg.conj();
            }
        }
        Ok(HermitianMatrix(sym))
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, QuantumError> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        HermitianMatrix(ComplexMatrix::from_real_diagonal(diag))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl AsRef<ComplexMatrix> for ComplexMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validates_and_symmetrizes() {
        let rows = vec![vec![c(1.0, 0.0), c(0.5, 0.25)], vec![c(0.5, -0.25 + 1e-13), c(-2.0, 1e-14)]];
        let h = HermitianMatrix::from_rows(rows).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
        assert_eq!(h.matrix()[(1, 1)], c(-2.0, 0.0));

        let bad = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(HermitianMatrix::from_rows(bad), Err(QuantumError::NotHermitian { .. })));
        let ragged = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0)]];
        assert!(matches!(ComplexMatrix::from_rows(ragged), Err(QuantumError::NotSquare { .. })));
    }
}
