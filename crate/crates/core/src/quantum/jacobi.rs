//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that zeroes it.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix};
use super::QuantumError;

pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// `H = V diag(values) V†`, eigenvalues ascending, eigenvectors in the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Runs sweeps until the off-diagonal Frobenius norm is at most
/// `1e-12 · max(1, ‖H‖_F)`.
pub fn jacobi_eigh(h: &HermitianMatrix) -> Result<Eigendecomposition, QuantumError> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOLERANCE * a.frobenius_norm().max(1.0);
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(QuantumError::NoConvergence { sweeps, off_diagonal: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(Eigendecomposition { values, vectors, sweeps })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let r = b.norm();
    if r == 0.0 {
        return;
    }
    let phase = b / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (tau * tau + 1.0).sqrt())
    } else {
        -1.0 / (-tau + (tau * tau + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase.conj() * -s;
    let g_qq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_needs_no_sweeps() {
        let h = HermitianMatrix::from_real_diagonal(&[3.0, -1.0, 2.0]);
        let eig = jacobi_eigh(&h).unwrap();
        assert_eq!(eig.sweeps, 0);
        assert_eq!(eig.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y_spectrum() {
        let c = |re, im| Complex64::new(re, im);
        let y = HermitianMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let eig = jacobi_eigh(&y).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-15 && (eig.values[1] - 1.0).abs() < 1e-15);
        let lambda = ComplexMatrix::from_real_diagonal(&eig.values);
        let hv = y.matrix().matmul(&eig.vectors);
        let vl = eig.vectors.matmul(&lambda);
        assert!(hv.max_abs_diff(&vl) < 1e-14);
    }
}
