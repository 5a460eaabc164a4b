//! Lindblad models, Lindblad spans, and the commuting-noise code design.
//!
//! A sensor is described by a Hamiltonian (carrying the estimand as an
//! overall scalar) and a set of jump operators. The span generated by the
//! identity, the jumps, their adjoints, and their pairwise products decides
//! whether a code can remove the noise without removing the signal: the
//! signal survives exactly when the Hamiltonian lies outside that span.
//! For mutually commuting models the optimal two-dimensional code is read
//! off an l1-ball linear program over the common eigenbasis.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{
    eigh, inner, orthonormal_basis, real_vec, vec_norm, DenseMatrix, LinalgError, RANK_TOL,
};
use crate::lp::{solve_l1, L1BallProgram, LpError, LpSolution};

/// Commutator tolerance for the commuting-noise hypothesis.
const COMMUTATOR_TOL: f64 = 1e-10;
/// Off-diagonal tolerance when validating a common eigenbasis.
const DIAGONAL_TOL: f64 = 1e-8;
/// LP values below this threshold mean the Hamiltonian is inside the
/// diagonal span, i.e. the design precondition fails.
const HNLS_LP_TOL: f64 = 1e-9;
/// Knill-Laflamme deviation threshold and signal-nonvanishing threshold.
const KL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("hamiltonian must be Hermitian (deviation {0:.3e})")]
    HamiltonianNotHermitian(f64),
    #[error("operator {name} has dimension {actual}, expected {expected}")]
    WrongDimension {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("jump rates must be nonnegative and finite")]
    BadRate,
    #[error("operators {first} and {second} do not commute: |[A,B]| = {norm:.3e}")]
    NotCommuting {
        first: String,
        second: String,
        norm: f64,
    },
    #[error("no common eigenbasis found after {attempts} randomized attempts (worst off-diagonal residual {residual:.3e})")]
    CommonBasisNotFound { attempts: usize, residual: f64 },
    #[error("HNLS is violated at the diagonal level (LP value {lp_value:.3e})")]
    HnlsViolated { lp_value: f64 },
    #[error("state vectors do not form an orthonormal pair: {0}")]
    InvalidCode(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Finite-dimensional sensor model: Hamiltonian, jump operators, and rates.
///
/// The estimand multiplies the Hamiltonian as a scalar and is kept symbolic
/// here; rates scale the dissipators and are listed separately so they can
/// stay at one when already absorbed into the jumps.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    dimension: usize,
    hamiltonian: DenseMatrix,
    jumps: Vec<DenseMatrix>,
    rates: Vec<f64>,
}

impl LindbladModel {
    pub fn new(
        hamiltonian: DenseMatrix,
        jumps: Vec<DenseMatrix>,
        rates: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let d = hamiltonian.rows();
        if !hamiltonian.is_square() {
            return Err(ModelError::WrongDimension {
                name: "hamiltonian".into(),
                expected: d,
                actual: hamiltonian.cols(),
            });
        }
        let h_dev = hamiltonian.hermitian_deviation();
        if h_dev > 1e-12 * hamiltonian.frobenius_norm().max(1.0) {
            return Err(ModelError::HamiltonianNotHermitian(h_dev));
        }
        for (i, jump) in jumps.iter().enumerate() {
            if jump.rows() != d || jump.cols() != d {
                return Err(ModelError::WrongDimension {
                    name: format!("jump {i}"),
                    expected: d,
                    actual: jump.rows().max(jump.cols()),
                });
            }
        }
        if rates.len() != jumps.len() || rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(ModelError::BadRate);
        }
        Ok(Self {
            dimension: d,
            hamiltonian,
            jumps,
            rates,
        })
    }

    /// All rates equal to one.
    pub fn with_unit_rates(
        hamiltonian: DenseMatrix,
        jumps: Vec<DenseMatrix>,
    ) -> Result<Self, ModelError> {
        let rates = vec![1.0; jumps.len()];
        Self::new(hamiltonian, jumps, rates)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn hamiltonian(&self) -> &DenseMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[DenseMatrix] {
        &self.jumps
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Jumps with zero rate contribute nothing to the dynamics or the span.
    fn active_jumps(&self) -> impl Iterator<Item = &DenseMatrix> {
        self.jumps
            .iter()
            .zip(&self.rates)
            .filter(|(_, &r)| r > 0.0)
            .map(|(j, _)| j)
    }
}

/// Frobenius-orthonormal Hermitian basis of the span generated by the
/// identity, the jumps, their adjoints, and their pairwise products.
#[derive(Debug, Clone)]
pub struct LindbladSpan {
    dimension: usize,
    basis: Vec<DenseMatrix>,
}

impl LindbladSpan {
    pub(crate) fn from_generators(
        dimension: usize,
        generators: impl IntoIterator<Item = DenseMatrix>,
    ) -> Self {
        let mut hermitian_parts: Vec<Vec<Complex64>> = Vec::new();
        for g in generators {
            hermitian_parts.push(g.hermitian_part().entries().to_vec());
            hermitian_parts.push(g.antihermitian_part().entries().to_vec());
        }
        let ortho = orthonormal_basis(&hermitian_parts, RANK_TOL);
        let basis = ortho
            .into_iter()
            .map(|flat| DenseMatrix::new(dimension, dimension, flat).expect("valid span element"))
            .collect();
        Self { dimension, basis }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis(&self) -> &[DenseMatrix] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Frobenius distance from `op` to the span.
    pub fn distance(&self, op: &DenseMatrix) -> f64 {
        let mut residual = op.entries().to_vec();
        let flat_basis: Vec<&[Complex64]> = self.basis.iter().map(|b| b.entries()).collect();
        for q in &flat_basis {
            let coeff = inner(q, &residual);
            for (r, qi) in residual.iter_mut().zip(q.iter()) {
                *r -= coeff * qi;
            }
        }
        vec_norm(&residual)
    }
}

/// Span generated by `{I, L_i, L_i^dag, L_i^dag L_j}`.
pub fn build_span(model: &LindbladModel) -> LindbladSpan {
    let d = model.dimension();
    let mut generators = vec![DenseMatrix::identity(d)];
    let active: Vec<&DenseMatrix> = model.active_jumps().collect();
    for jump in &active {
        generators.push((*jump).clone());
    }
    for li in &active {
        for lj in &active {
            generators.push(li.adjoint().matmul(lj));
        }
    }
    LindbladSpan::from_generators(d, generators)
}

/// Outcome of the Hamiltonian-not-in-Lindblad-span membership test.
#[derive(Debug, Clone, Copy)]
pub struct HnlsReport {
    pub holds: bool,
    /// Frobenius distance from the Hamiltonian to the span.
    pub residual_norm: f64,
}

/// Test whether the Hamiltonian lies outside the Lindblad span.
pub fn hnls_check(model: &LindbladModel) -> HnlsReport {
    let span = build_span(model);
    let residual_norm = span.distance(model.hamiltonian());
    let tol = RANK_TOL * model.hamiltonian().frobenius_norm().max(1.0);
    HnlsReport {
        holds: residual_norm > tol,
        residual_norm,
    }
}

/// A commuting model reduced to diagonal data in a common eigenbasis.
#[derive(Debug, Clone)]
pub struct DiagonalModel {
    dimension: usize,
    /// Unitary whose columns are the common eigenbasis.
    basis: DenseMatrix,
    /// Diagonal of the Hamiltonian in that basis.
    gaps: Vec<f64>,
    /// Diagonals of the jump operators.
    jump_diagonals: Vec<Vec<Complex64>>,
    /// Real span of the diagonal data (always contains the all-ones row).
    span_rows: Vec<Vec<f64>>,
}

impl DiagonalModel {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn jump_diagonals(&self) -> &[Vec<Complex64>] {
        &self.jump_diagonals
    }

    pub fn span_rows(&self) -> &[Vec<f64>] {
        &self.span_rows
    }
}

/// Reduce a pairwise-commuting model to diagonal data.
///
/// The common eigenbasis is found by diagonalizing the Hamiltonian plus a
/// random Hermitian combination of the jump parts, retrying with fresh
/// coefficients when a degenerate spectrum hides part of the basis.
pub fn diagonalize_commuting(model: &LindbladModel) -> Result<DiagonalModel, ModelError> {
    let d = model.dimension();
    let jumps: Vec<&DenseMatrix> = model.active_jumps().collect();

    let mut named: Vec<(String, &DenseMatrix)> = vec![("hamiltonian".into(), model.hamiltonian())];
    for (i, j) in jumps.iter().enumerate() {
        named.push((format!("jump {i}"), j));
    }
    for a in 0..named.len() {
        for b in (a + 1)..named.len() {
            let comm = named[a].1.commutator(named[b].1);
            let norm = comm.frobenius_norm();
            let tol = COMMUTATOR_TOL
                * named[a].1.frobenius_norm().max(1.0)
                * named[b].1.frobenius_norm().max(1.0);
            if norm > tol {
                return Err(ModelError::NotCommuting {
                    first: named[a].0.clone(),
                    second: named[b].0.clone(),
                    norm,
                });
            }
        }
    }

    let attempts = 5;
    let mut worst_residual = f64::INFINITY;
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9ec5_e25e + attempt as u64);
        let mut probe = model.hamiltonian().clone();
        for jump in &jumps {
            let ch: f64 = rng.gen_range(0.05..0.3);
            let ca: f64 = rng.gen_range(0.05..0.3);
            probe = probe.add(&jump.hermitian_part().scale(Complex64::new(ch, 0.0)));
            probe = probe.add(&jump.antihermitian_part().scale(Complex64::new(ca, 0.0)));
        }
        let eig = eigh(&probe)?;
        let v = &eig.eigenvectors;
        let vdag = v.adjoint();

        let mut all_diagonal = true;
        let mut residual: f64 = 0.0;
        let mut rotated: Vec<DenseMatrix> = Vec::with_capacity(named.len());
        for (_, op) in &named {
            let in_basis = vdag.matmul(op).matmul(v);
            let off = off_diagonal_norm(&in_basis);
            residual = residual.max(off / op.frobenius_norm().max(1.0));
            if off > DIAGONAL_TOL * op.frobenius_norm().max(1.0) {
                all_diagonal = false;
                break;
            }
            rotated.push(in_basis);
        }
        worst_residual = worst_residual.min(residual);
        if !all_diagonal {
            continue;
        }

        let gaps: Vec<f64> = rotated[0].diag().iter().map(|z| z.re).collect();
        let jump_diagonals: Vec<Vec<Complex64>> =
            rotated[1..].iter().map(|m| m.diag()).collect();
        let span_rows = diagonal_span_rows(d, &jump_diagonals);
        return Ok(DiagonalModel {
            dimension: d,
            basis: v.clone(),
            gaps,
            jump_diagonals,
            span_rows,
        });
    }
    Err(ModelError::CommonBasisNotFound {
        attempts,
        residual: worst_residual,
    })
}

/// Real rows spanning the diagonal restriction of the Lindblad span: the
/// all-ones row plus real and imaginary parts of the jump diagonals and of
/// their pairwise conjugate products.
fn diagonal_span_rows(d: usize, jump_diagonals: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let mut raw: Vec<Vec<f64>> = vec![vec![1.0; d]];
    for diag in jump_diagonals {
        raw.push(diag.iter().map(|z| z.re).collect());
        raw.push(diag.iter().map(|z| z.im).collect());
    }
    for di in jump_diagonals {
        for dj in jump_diagonals {
            let prod: Vec<Complex64> = di.iter().zip(dj).map(|(a, b)| a.conj() * b).collect();
            raw.push(prod.iter().map(|z| z.re).collect());
            raw.push(prod.iter().map(|z| z.im).collect());
        }
    }
    // orthonormalize to a full-rank row set, keeping the ones direction
    let complex_rows: Vec<Vec<Complex64>> = raw.iter().map(|r| real_vec(r)).collect();
    orthonormal_basis(&complex_rows, RANK_TOL)
        .into_iter()
        .map(|row| row.into_iter().map(|z| z.re).collect())
        .collect()
}

fn off_diagonal_norm(m: &DenseMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Two orthonormal logical states with their rank-2 codespace projector.
#[derive(Debug, Clone)]
pub struct CodePair {
    ket0: Vec<Complex64>,
    ket1: Vec<Complex64>,
}

impl CodePair {
    pub fn new(ket0: Vec<Complex64>, ket1: Vec<Complex64>) -> Result<Self, ModelError> {
        if ket0.len() != ket1.len() {
            return Err(ModelError::InvalidCode(format!(
                "state dimensions differ: {} vs {}",
                ket0.len(),
                ket1.len()
            )));
        }
        let n0 = vec_norm(&ket0);
        let n1 = vec_norm(&ket1);
        if (n0 - 1.0).abs() > 1e-10 || (n1 - 1.0).abs() > 1e-10 {
            return Err(ModelError::InvalidCode(format!(
                "norms {n0} and {n1} differ from one"
            )));
        }
        let overlap = inner(&ket0, &ket1).norm();
        if overlap > 1e-10 {
            return Err(ModelError::InvalidCode(format!(
                "logical states overlap by {overlap:.3e}"
            )));
        }
        Ok(Self { ket0, ket1 })
    }

    pub fn dimension(&self) -> usize {
        self.ket0.len()
    }

    pub fn ket0(&self) -> &[Complex64] {
        &self.ket0
    }

    pub fn ket1(&self) -> &[Complex64] {
        &self.ket1
    }

    /// `P = |0><0| + |1><1|`.
    pub fn projector(&self) -> DenseMatrix {
        DenseMatrix::outer(&self.ket0, &self.ket0).add(&DenseMatrix::outer(&self.ket1, &self.ket1))
    }

    /// Logical Pauli Z, `|0><0| - |1><1|`.
    pub fn logical_z(&self) -> DenseMatrix {
        DenseMatrix::outer(&self.ket0, &self.ket0).sub(&DenseMatrix::outer(&self.ket1, &self.ket1))
    }

    /// Logical Pauli X, `|0><1| + |1><0|`.
    pub fn logical_x(&self) -> DenseMatrix {
        DenseMatrix::outer(&self.ket0, &self.ket1).add(&DenseMatrix::outer(&self.ket1, &self.ket0))
    }

    /// Logical Pauli Y.
    pub fn logical_y(&self) -> DenseMatrix {
        DenseMatrix::outer(&self.ket0, &self.ket1)
            .scale(Complex64::new(0.0, -1.0))
            .add(&DenseMatrix::outer(&self.ket1, &self.ket0).scale(Complex64::new(0.0, 1.0)))
    }

    /// `(|0> + |1>)/sqrt(2)`, the optimal probe within the codespace.
    pub fn plus_state(&self) -> Vec<Complex64> {
        let inv = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        self.ket0
            .iter()
            .zip(&self.ket1)
            .map(|(a, b)| (a + b) * inv)
            .collect()
    }

    /// Expectation `<0|A|0> - <1|A|1>` scaled logical-Z component of `PAP`.
    pub fn logical_z_component(&self, op: &DenseMatrix) -> Complex64 {
        let a00 = inner(&self.ket0, &op.matvec(&self.ket0));
        let a11 = inner(&self.ket1, &op.matvec(&self.ket1));
        (a00 - a11) * Complex64::new(0.5, 0.0)
    }
}

/// A designed code together with its design vector and achieved QFI
/// coefficient `F(t)/t^2`.
#[derive(Debug, Clone)]
pub struct DesignResult {
    pub code: CodePair,
    /// Optimal design vector (positive part minus negative part).
    pub design_vector: Vec<f64>,
    /// Achieved QFI coefficient `|<beta, h>|^2 = F(t)/t^2`.
    pub qfi_coefficient: f64,
    pub lp: LpSolution,
}

/// Build the optimal commuting-noise code from the diagonal data.
///
/// The logical amplitudes are the square roots of the positive and
/// negative parts of the optimal l1-program vertex; the achieved QFI
/// coefficient equals four times the squared l-infinity distance from the
/// gap vector to the diagonal span.
pub fn design_commuting_code(diag: &DiagonalModel) -> Result<DesignResult, ModelError> {
    let program = L1BallProgram::new(diag.gaps.to_vec(), diag.span_rows.to_vec(), 2.0)?;
    let lp = solve_l1(&program)?;
    if lp.objective_value <= HNLS_LP_TOL {
        return Err(ModelError::HnlsViolated {
            lp_value: lp.objective_value,
        });
    }

    let d = diag.dimension;
    let mut amp0 = vec![Complex64::new(0.0, 0.0); d];
    let mut amp1 = vec![Complex64::new(0.0, 0.0); d];
    for (i, &beta) in lp.argmax.iter().enumerate() {
        if beta > 0.0 {
            amp0[i] = Complex64::new(beta.sqrt(), 0.0);
        } else if beta < 0.0 {
            amp1[i] = Complex64::new((-beta).sqrt(), 0.0);
        }
    }
    normalize(&mut amp0);
    normalize(&mut amp1);

    // map back from the common eigenbasis to the original basis
    let ket0 = diag.basis.matvec(&amp0);
    let ket1 = diag.basis.matvec(&amp1);
    let code = CodePair::new(ket0, ket1)?;

    let signal: f64 = lp
        .argmax
        .iter()
        .zip(&diag.gaps)
        .map(|(b, h)| b * h)
        .sum();
    Ok(DesignResult {
        code,
        design_vector: lp.argmax.clone(),
        qfi_coefficient: signal * signal,
        lp,
    })
}

fn normalize(v: &mut [Complex64]) {
    let norm = vec_norm(v);
    if norm > 0.0 {
        let inv = Complex64::new(1.0 / norm, 0.0);
        for z in v.iter_mut() {
            *z *= inv;
        }
    }
}

/// Deviations from the error-correction conditions for a code and model.
#[derive(Debug, Clone, Copy)]
pub struct KlReport {
    /// Worst `|P L P - c P|` over jumps.
    pub max_jump_deviation: f64,
    /// Worst `|P L_i^dag L_j P - c P|` over jump pairs.
    pub max_product_deviation: f64,
    /// `|P H P - c P|`, which must stay away from zero for sensing.
    pub signal_strength: f64,
    pub passes: bool,
}

/// Check the Knill-Laflamme sensing conditions for `code` against `model`.
pub fn verify_kl(code: &CodePair, model: &LindbladModel) -> KlReport {
    let p = code.projector();
    let jumps: Vec<&DenseMatrix> = model.active_jumps().collect();

    let mut max_jump = 0.0f64;
    for jump in &jumps {
        max_jump = max_jump.max(projected_deviation(&p, jump));
    }
    let mut max_product = 0.0f64;
    for li in &jumps {
        for lj in &jumps {
            let prod = li.adjoint().matmul(lj);
            max_product = max_product.max(projected_deviation(&p, &prod));
        }
    }
    let signal = projected_deviation(&p, model.hamiltonian());
    KlReport {
        max_jump_deviation: max_jump,
        max_product_deviation: max_product,
        signal_strength: signal,
        passes: max_jump <= KL_TOL && max_product <= KL_TOL && signal > KL_TOL,
    }
}

/// Same check against an explicit span basis (used for noise spans that are
/// not generated by jump products alone, e.g. the bosonic modified span).
pub fn verify_kl_span(
    code: &CodePair,
    span: &LindbladSpan,
    hamiltonian: &DenseMatrix,
) -> KlReport {
    let p = code.projector();
    let mut max_dev = 0.0f64;
    for element in span.basis() {
        max_dev = max_dev.max(projected_deviation(&p, element));
    }
    let signal = projected_deviation(&p, hamiltonian);
    KlReport {
        max_jump_deviation: max_dev,
        max_product_deviation: max_dev,
        signal_strength: signal,
        passes: max_dev <= KL_TOL && signal > KL_TOL,
    }
}

/// `|P A P - (tr(P A P)/2) P|_F`: distance of the projected operator from
/// a multiple of the projector.
fn projected_deviation(p: &DenseMatrix, op: &DenseMatrix) -> f64 {
    let pap = p.matmul(op).matmul(p);
    let coeff = pap.trace() * Complex64::new(0.5, 0.0);
    pap.sub(&p.scale(coeff)).frobenius_norm()
}

/// The three-level fixture with non-commuting noise where HNLS holds but
/// no ancilla-free sensing code exists.
pub fn gell_mann_fixture(extra_dim: usize) -> LindbladModel {
    let d = 3 + extra_dim;
    let embed = |rows: [[(f64, f64); 3]; 3]| {
        DenseMatrix::from_fn(d, d, |i, j| {
            if i < 3 && j < 3 {
                Complex64::new(rows[i][j].0, rows[i][j].1)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let z = (0.0, 0.0);
    let lambda1 = embed([[z, (1.0, 0.0), z], [(1.0, 0.0), z, z], [z, z, z]]);
    let lambda2 = embed([[z, (0.0, -1.0), z], [(0.0, 1.0), z, z], [z, z, z]]);
    let lambda4 = embed([[z, z, (1.0, 0.0)], [z, z, z], [(1.0, 0.0), z, z]]);
    let lambda5 = embed([[z, z, (0.0, -1.0)], [z, z, z], [(0.0, 1.0), z, z]]);
    LindbladModel::with_unit_rates(lambda5, vec![lambda1, lambda2, lambda4])
        .expect("fixture is valid")
}
