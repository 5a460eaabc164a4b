//! Dense linear solve via LU with partial pivoting.

use num_complex::Complex64;

use super::{DenseMatrix, LinalgError};

/// Relative pivot tolerance below which the matrix is declared singular.
const PIVOT_TOL: f64 = 1e-12;

/// Solve `A x = b` for square nonsingular `A`.
pub fn solve_linear(a: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }

    let scale = a.max_abs_entry().max(f64::MIN_POSITIVE);
    let mut lu = a.clone();
    let mut rhs = b.to_vec();

    for k in 0..n {
        // partial pivot
        let mut pivot_row = k;
        let mut pivot_mag = lu[(k, k)].norm();
        for i in (k + 1)..n {
            let mag = lu[(i, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag <= PIVOT_TOL * scale {
            return Err(LinalgError::Singular {
                pivot: pivot_mag,
                step: k,
            });
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            rhs.swap(k, pivot_row);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let lkj = lu[(k, j)];
                lu[(i, j)] -= factor * lkj;
            }
            let rk = rhs[k];
            rhs[i] -= factor * rk;
        }
    }

    // back substitution
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= lu[(i, j)] * x[j];
        }
        x[i] = acc / lu[(i, i)];
    }
    Ok(x)
}

/// Real-matrix convenience wrapper over [`solve_linear`].
pub(crate) fn solve_real(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let m = DenseMatrix::from_real_rows(a)?;
    let rhs: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let x = solve_linear(&m, &rhs)?;
    Ok(x.into_iter().map(|z| z.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_norm;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let a = DenseMatrix::identity(3);
        let b = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let x = solve_linear(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn chebyshev_weight_system_by_hand() {
        // s = 2, M = 100 support system: rows are the alternating row, the
        // filtered first power, and the normalization; solution (1/2, 1, 1/2).
        let a = DenseMatrix::from_real_rows(&[
            vec![1.0, -1.0, 1.0],
            vec![0.0, -0.5, 1.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        let b = vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let x = solve_linear(&a, &b).unwrap();
        assert!((x[0].re - 0.5).abs() <= 1e-12);
        assert!((x[1].re - 1.0).abs() <= 1e-12);
        assert!((x[2].re - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn random_system_residual() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 8;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            // diagonally dominant, hence well conditioned
            let base = if i == j { 4.0 } else { 0.0 };
            c(base + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let b: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let x = solve_linear(&a, &b).unwrap();
        let ax = a.matvec(&x);
        let resid: f64 = ax
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let bound = 1e-10 * (a.frobenius_norm() * vec_norm(&x) + vec_norm(&b));
        assert!(resid <= bound, "residual {resid:.3e} above {bound:.3e}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let b = vec![c(1.0, 0.0), c(2.0, 0.0)];
        assert!(matches!(
            solve_linear(&a, &b),
            Err(LinalgError::Singular { .. })
        ));
    }
}
