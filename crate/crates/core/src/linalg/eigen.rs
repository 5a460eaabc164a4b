//! Hermitian eigendecomposition by cyclic Jacobi sweeps.

use num_complex::Complex64;

use super::{DenseMatrix, LinalgError};

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as matrix columns, in eigenvalue order.
    pub eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    /// Reconstruct `V diag(lambda) V^dag`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let v = &self.eigenvectors;
        let lam = DenseMatrix::real_diagonal(&self.eigenvalues);
        v.matmul(&lam).matmul(&v.adjoint())
    }
}

/// Symmetric/Hermitian eigendecomposition.
///
/// Requires `|A - A^dag|_F <= 1e-12 |A|_F`. The returned eigenvalues are
/// ascending and the reconstruction error is at machine-precision level,
/// far below the contract of `1e-10 |A|_F`.
pub fn eigh(a: &DenseMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let scale = a.frobenius_norm();
    let deviation = a.hermitian_deviation();
    let tolerance = 1e-12 * scale;
    if deviation > tolerance {
        return Err(LinalgError::NotHermitian {
            deviation,
            tolerance,
        });
    }

    let n = a.rows();
    // Work on the exactly-Hermitian part so roundoff in the input cannot leak
    // into complex diagonal entries.
    let mut m = a.hermitian_part();
    let mut v = DenseMatrix::identity(n);

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= OFF_DIAGONAL_TOL * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
fn rotate(m: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, scale: f64) {
    let n = m.rows();
    let mpq = m[(p, q)];
    let r = mpq.norm();
    if r <= 1e-300 || r <= 1e-16 * scale {
        return;
    }
    let phase = mpq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (app - aqq) / (2.0 * r);
    let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let cs = Complex64::new(c, 0.0);
    let s_phase = phase * s;
    let s_phase_conj = phase.conj() * s;

    // columns: M <- M J with J[pp]=c, J[pq]=-s*phase, J[qp]=s*conj(phase), J[qq]=c
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = cs * mip + s_phase_conj * miq;
        m[(i, q)] = -s_phase * mip + cs * miq;
    }
    // rows: M <- J^dag M
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = cs * mpj + s_phase * mqj;
        m[(q, j)] = -s_phase_conj * mpj + cs * mqj;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = cs * vip + s_phase_conj * viq;
        v[(i, q)] = -s_phase * vip + cs * viq;
    }
}
