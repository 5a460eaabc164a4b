//! Minimal dense complex linear algebra.
//!
//! Everything in this crate works on small dense matrices (dimension up to a
//! few hundred), so the kernels here favour exactness and determinism over
//! asymptotic speed: a cyclic Jacobi eigensolver, LU with partial pivoting,
//! and modified Gram-Schmidt for subspace bases.

mod eigen;
pub(crate) mod solve;

pub use eigen::{eigh, EigenDecomposition};
pub use solve::solve_linear;

use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance used when extracting kernels and column spaces.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: |A - A^dag| = {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix is singular: pivot {pivot:.3e} at step {step} below tolerance")]
    Singular { pivot: f64, step: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("invalid shape: {0}")]
    BadShape(String),
}

/// Dense complex matrix in row-major order.
///
/// Real matrices are simply the imaginary-part-zero case; scalars are stored
/// as pairs of 64-bit floats throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::BadShape(format!(
                "rows and cols must be at least 1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(LinalgError::BadShape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        if r == 0 {
            return Err(LinalgError::BadShape("no rows given".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::BadShape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must match");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)] * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diag().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    /// (A + A^dag)/2, Hermitian by construction.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// (A - A^dag)/(2i), Hermitian by construction.
    pub fn antihermitian_part(&self) -> Self {
        self.sub(&self.adjoint()).scale(Complex64::new(0.0, -0.5))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// |u><v| outer product.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(
            self.rows * other.rows,
            self.cols * other.cols,
            |i, j| {
                self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
            },
        )
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.sub(other).frobenius_norm() <= tol
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Conjugate-linear inner product <u|v>.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn real_vec(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Orthonormalize `vectors` by modified Gram-Schmidt with a second
/// re-orthogonalization pass, dropping vectors whose residual after
/// projection falls below `rank_tol` relative to their original norm.
pub fn orthonormal_basis(vectors: &[Vec<Complex64>], rank_tol: f64) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let original_norm = vec_norm(v);
        if original_norm == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let coeff = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= coeff * qi;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > rank_tol * original_norm {
            let inv = Complex64::new(1.0 / norm, 0.0);
            basis.push(w.into_iter().map(|z| z * inv).collect());
        }
    }
    basis
}

/// Orthogonal projector onto the span of `basis` vectors.
///
/// The span is extracted by Gram-Schmidt with drop tolerance `rank_tol`;
/// an empty (or all-degenerate) basis yields the zero projector.
pub fn subspace_projector(basis: &[Vec<Complex64>], rank_tol: f64) -> DenseMatrix {
    let dim = basis.first().map_or(0, Vec::len);
    assert!(
        basis.iter().all(|v| v.len() == dim),
        "basis vectors must share one dimension"
    );
    if dim == 0 {
        return DenseMatrix::zeros(1, 1);
    }
    let ortho = orthonormal_basis(basis, rank_tol);
    let mut p = DenseMatrix::zeros(dim, dim);
    for q in &ortho {
        p = p.add(&DenseMatrix::outer(q, q));
    }
    p
}

/// Result of a polar factorization `B = U sqrt(B^dag B)`.
#[derive(Debug, Clone)]
pub enum PolarFactor {
    /// `B` was zero at the given tolerance; the factor is the zero map.
    Zero,
    /// Partial isometry acting as `B (B^dag B)^{-1/2}` on the support of
    /// `B^dag B` and as zero on its kernel.
    Isometry(DenseMatrix),
}

impl PolarFactor {
    pub fn as_matrix(&self, dim: usize) -> DenseMatrix {
        match self {
            PolarFactor::Zero => DenseMatrix::zeros(dim, dim),
            PolarFactor::Isometry(u) => u.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PolarFactor::Zero)
    }
}

/// Partial isometry factor of the polar decomposition of a square matrix.
///
/// Returns [`PolarFactor::Zero`] when `|B|_F <= tol`.
pub fn polar_unitary(b: &DenseMatrix, tol: f64) -> Result<PolarFactor, LinalgError> {
    if !b.is_square() {
        return Err(LinalgError::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    if b.frobenius_norm() <= tol {
        return Ok(PolarFactor::Zero);
    }
    let gram = b.adjoint().matmul(b);
    let eig = eigh(&gram)?;
    // The support cutoff lives in Gram-eigenvalue space: eigenvalues below
    // the eigensolver noise floor (relative to the largest one) would
    // otherwise inject unit-norm junk directions after the 1/sigma scaling.
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_TOL * lambda_max;
    let dim = b.rows();
    let mut u = DenseMatrix::zeros(dim, dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let sigma = lambda.sqrt();
        let v = eig.eigenvectors.column(k);
        let bv = b.matvec(&v);
        let scaled: Vec<Complex64> = bv
            .iter()
            .map(|z| z * Complex64::new(1.0 / sigma, 0.0))
            .collect();
        u = u.add(&DenseMatrix::outer(&scaled, &v));
    }
    Ok(PolarFactor::Isometry(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(DenseMatrix::new(0, 1, vec![]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = DenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ab = a.matmul(&b);
        let expected = DenseMatrix::from_real_rows(&[vec![2.0, 1.0], vec![4.0, 3.0]]).unwrap();
        assert!(ab.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn projector_single_unit_vector() {
        let basis = vec![real_vec(&[1.0, 0.0, 0.0])];
        let p = subspace_projector(&basis, RANK_TOL);
        let expected = DenseMatrix::real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(p.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn projector_onto_col_of_centering_matrix() {
        // col(I - J/3) is the plane orthogonal to (1,1,1).
        let basis = vec![
            real_vec(&[2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]),
            real_vec(&[-1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]),
            real_vec(&[-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0]),
        ];
        let p = subspace_projector(&basis, RANK_TOL);
        let expected = DenseMatrix::from_fn(3, 3, |i, j| {
            c(if i == j { 1.0 - 1.0 / 3.0 } else { -1.0 / 3.0 }, 0.0)
        });
        assert!(p.approx_eq(&expected, 1e-10));
    }

    #[test]
    fn projector_ignores_duplicated_vectors() {
        let v = real_vec(&[0.6, 0.8, 0.0]);
        let single = subspace_projector(&[v.clone()], RANK_TOL);
        let doubled = subspace_projector(&[v.clone(), v], RANK_TOL);
        assert!(single.approx_eq(&doubled, 1e-12));
    }

    #[test]
    fn projector_is_idempotent_and_hermitian() {
        let basis = vec![
            vec![c(1.0, 0.5), c(0.0, -1.0), c(0.3, 0.0)],
            vec![c(0.2, 0.0), c(1.0, 1.0), c(-0.4, 0.1)],
        ];
        let p = subspace_projector(&basis, RANK_TOL);
        assert!(p.matmul(&p).approx_eq(&p, 1e-10));
        assert!(p.adjoint().approx_eq(&p, 1e-10));
    }

    #[test]
    fn polar_of_scaled_identity_is_identity() {
        let b = DenseMatrix::identity(2).scale(c(2.0, 0.0));
        let u = polar_unitary(&b, 1e-12).unwrap();
        assert!(u.as_matrix(2).approx_eq(&DenseMatrix::identity(2), 1e-12));
    }

    #[test]
    fn polar_of_zero_is_zero() {
        let b = DenseMatrix::zeros(3, 3);
        assert!(polar_unitary(&b, 1e-12).unwrap().is_zero());
    }

    #[test]
    fn polar_of_signed_diagonal() {
        let b = DenseMatrix::real_diagonal(&[3.0, -2.0]);
        let u = polar_unitary(&b, 1e-12).unwrap().as_matrix(2);
        let expected = DenseMatrix::real_diagonal(&[1.0, -1.0]);
        assert!(u.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn polar_reconstructs_input_on_support() {
        let b = DenseMatrix::new(
            2,
            2,
            vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let u = polar_unitary(&b, 1e-12).unwrap().as_matrix(2);
        let gram = b.adjoint().matmul(&b);
        let eig = eigh(&gram).unwrap();
        // sqrt(B^dag B) from the eigendecomposition
        let mut root = DenseMatrix::zeros(2, 2);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            root = root.add(&DenseMatrix::outer(&v, &v).scale(c(l.max(0.0).sqrt(), 0.0)));
        }
        assert!(u.matmul(&root).approx_eq(&b, 1e-10));
    }

    proptest! {
        #[test]
        fn projector_invariant_under_basis_recombination(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let dim = 4;
            let basis: Vec<Vec<Complex64>> = (0..2)
                .map(|_| (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
                .collect();
            let p1 = subspace_projector(&basis, RANK_TOL);
            // invertible recombination: [v0 + 2 v1, v1 - v0], plus reversed order
            let mix0: Vec<Complex64> = basis[0].iter().zip(&basis[1]).map(|(a, b)| a + c(2.0, 0.0) * b).collect();
            let mix1: Vec<Complex64> = basis[1].iter().zip(&basis[0]).map(|(a, b)| a - b).collect();
            let p2 = subspace_projector(&[mix1, mix0], RANK_TOL);
            prop_assert!(p1.approx_eq(&p2, 1e-10));
        }

        #[test]
        fn polar_isometry_preserves_row_space(seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b = DenseMatrix::from_fn(4, 4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            // full rank with probability 1: U^dag U should act as the identity
            let u = polar_unitary(&b, 1e-12).unwrap().as_matrix(4);
            let udu = u.adjoint().matmul(&u);
            prop_assert!(udu.approx_eq(&DenseMatrix::identity(4), 1e-8));
        }
    }
}
