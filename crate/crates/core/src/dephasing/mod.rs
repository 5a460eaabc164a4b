//! Codes and sensitivities for N qubits under correlated dephasing.
//!
//! The noise is specified by a unit-diagonal correlation matrix C whose
//! eigenpairs are the normal modes of the phase noise. The codes here are
//! product states of single-qubit superpositions whose per-qubit Z
//! expectations trace out a profile vector: choosing that profile
//! orthogonal to the column space of C corrects every non-vanishing noise
//! mode while a signal accumulates through the remaining one. Beyond the
//! ideal case the profile is aligned with a subdominant mode instead, and
//! the resulting logical dynamics is again a dephasing qubit whose gap and
//! dephasing rate decide the achievable sensitivity.

mod recovery;

pub use recovery::{
    build_recovery, effective_dynamics, effective_qubit_closed_form, EffectiveQubit,
    RecoveryChannel,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{eigh, DenseMatrix, LinalgError, RANK_TOL};
use crate::lp::{solve_linf, LInfBallProgram, LpError, LpSolution};
use crate::model::{CodePair, LindbladModel, ModelError};

#[derive(Debug, Clone, Error)]
pub enum DephasingError {
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("correlation matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("correlation matrix diagonal entry {index} is {value}, expected 1")]
    NotUnitDiagonal { index: usize, value: f64 },
    #[error("at least 3 qubits are required, got {qubits}")]
    NTooSmall { qubits: usize },
    #[error("HNLS is violated: the gap vector lies in the column space of C")]
    HnlsViolated,
    #[error("gain {gamma} outside the admissible range (0, {max}]")]
    GammaOutOfRange { gamma: f64, max: f64 },
    #[error("every noise mode is orthogonal to the gap vector")]
    AllModesOrthogonal,
    #[error("recovery projectors overlap: {0}")]
    DegenerateCode(String),
    #[error("code does not correct the noise modes (KL residual {residual:.3e})")]
    NotCorrecting { residual: f64 },
    #[error("effective dynamics is not of dephasing-qubit form (residual {residual:.3e})")]
    NotDephasingForm { residual: f64 },
    #[error("ring model with {qubits} qubits needs {expected} correlation coefficients, got {actual}")]
    WrongAlphaCount {
        qubits: usize,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// N-qubit dephasing data: gap coefficients, correlation matrix, and the
/// common dephasing time.
#[derive(Debug, Clone)]
pub struct CorrelationModel {
    qubits: usize,
    gaps: Vec<f64>,
    correlation: DenseMatrix,
    t2: f64,
}

impl CorrelationModel {
    pub fn new(
        gaps: Vec<f64>,
        correlation: DenseMatrix,
        t2: f64,
    ) -> Result<Self, DephasingError> {
        let n = gaps.len();
        if n < 3 {
            return Err(DephasingError::NTooSmall { qubits: n });
        }
        if correlation.rows() != n || correlation.cols() != n {
            return Err(DephasingError::Invariant(format!(
                "correlation matrix must be {n}x{n}, got {}x{}",
                correlation.rows(),
                correlation.cols()
            )));
        }
        if !(t2 > 0.0) || !t2.is_finite() {
            return Err(DephasingError::Invariant(format!(
                "dephasing time must be positive, got {t2}"
            )));
        }
        if !gaps.iter().all(|g| g.is_finite()) {
            return Err(DephasingError::Invariant("gap vector must be finite".into()));
        }
        for i in 0..n {
            if (correlation[(i, i)].re - 1.0).abs() > 1e-12 || correlation[(i, i)].im.abs() > 1e-12
            {
                return Err(DephasingError::NotUnitDiagonal {
                    index: i,
                    value: correlation[(i, i)].re,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let z = correlation[(i, j)];
                if z.im.abs() > 1e-12 {
                    return Err(DephasingError::Invariant(
                        "correlation matrix must be real".into(),
                    ));
                }
                if z.re.abs() > 1.0 + 1e-12 {
                    return Err(DephasingError::Invariant(
                        "correlation entries must lie in [-1, 1]".into(),
                    ));
                }
                if (z.re - correlation[(j, i)].re).abs() > 1e-12 {
                    return Err(DephasingError::Invariant(
                        "correlation matrix must be symmetric".into(),
                    ));
                }
            }
        }
        let eig = eigh(&correlation)?;
        let min_eig = eig.eigenvalues[0];
        if min_eig < -1e-10 {
            return Err(DephasingError::NotPsd {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self {
            qubits: n,
            gaps,
            correlation,
            t2,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn correlation(&self) -> &DenseMatrix {
        &self.correlation
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }
}

/// Normal modes of the phase noise: eigenpairs of the correlation matrix.
#[derive(Debug, Clone)]
pub struct NoiseModes {
    qubits: usize,
    /// Ascending and clamped to be nonnegative.
    eigenvalues: Vec<f64>,
    modes: Vec<Vec<f64>>,
}

impl NoiseModes {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mode(&self, j: usize) -> &[f64] {
        &self.modes[j]
    }

    pub fn rank_tolerance(&self) -> f64 {
        RANK_TOL * self.eigenvalues.last().copied().unwrap_or(0.0).max(1.0)
    }

    /// Indices of modes with vanishing amplitude.
    pub fn kernel_indices(&self) -> Vec<usize> {
        let tol = self.rank_tolerance();
        (0..self.qubits)
            .filter(|&j| self.eigenvalues[j] <= tol)
            .collect()
    }

    /// Modes with non-vanishing amplitude, spanning col(C).
    pub fn column_space(&self) -> Vec<Vec<f64>> {
        let tol = self.rank_tolerance();
        (0..self.qubits)
            .filter(|&j| self.eigenvalues[j] > tol)
            .map(|j| self.modes[j].clone())
            .collect()
    }

    /// Projection of `v` onto the kernel of C.
    pub fn kernel_projection(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.qubits];
        for &j in &self.kernel_indices() {
            let overlap = dot(&self.modes[j], v);
            for (o, m) in out.iter_mut().zip(&self.modes[j]) {
                *o += overlap * m;
            }
        }
        out
    }

    /// Whether the gap vector escapes the column space of C.
    pub fn hnls_holds(&self, gaps: &[f64]) -> bool {
        let proj = self.kernel_projection(gaps);
        norm2(&proj) > 1e-9 * norm2(gaps).max(1e-300)
    }

    /// Jump operator `sqrt(lambda_j) v_j . Z` on the full 2^N space.
    pub fn jump_operator(&self, j: usize) -> DenseMatrix {
        let weights: Vec<f64> = self.modes[j]
            .iter()
            .map(|w| w * self.eigenvalues[j].sqrt())
            .collect();
        weighted_z(self.qubits, &weights)
    }

    /// `V D V^T`, for checking the reconstruction invariant.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.qubits;
        let mut out = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let col: Vec<Complex64> = self.modes[j]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            out = out.add(&DenseMatrix::outer(&col, &col).scale(Complex64::new(
                self.eigenvalues[j],
                0.0,
            )));
        }
        out
    }
}

/// Diagonalize the correlation matrix into noise modes.
///
/// Within the kernel (vanishing eigenvalues) the basis is rotated so that
/// at most one mode overlaps the gap vector; this gives approximate designs
/// a single uncorrected direction. Degenerate non-vanishing eigenvalues are
/// left in the order the eigensolver produced.
pub fn decompose_modes(cm: &CorrelationModel) -> Result<NoiseModes, DephasingError> {
    let eig = eigh(cm.correlation())?;
    let n = cm.qubits();
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let mut modes: Vec<Vec<f64>> = (0..n)
        .map(|j| eig.eigenvectors.column(j).iter().map(|z| z.re).collect())
        .collect();

    let tol = RANK_TOL * eigenvalues.last().copied().unwrap_or(0.0).max(1.0);
    let kernel: Vec<usize> = (0..n).filter(|&j| eigenvalues[j] <= tol).collect();
    if kernel.len() > 1 {
        align_cluster_with(&mut modes, &kernel, cm.gaps());
    }

    Ok(NoiseModes {
        qubits: n,
        eigenvalues,
        modes,
    })
}

/// Rotate the basis of a degenerate cluster so only its first member
/// overlaps `target` (Gram-Schmidt with the projected target first).
fn align_cluster_with(modes: &mut [Vec<f64>], cluster: &[usize], target: &[f64]) {
    let n = target.len();
    let mut projected = vec![0.0; n];
    for &j in cluster {
        let overlap = dot(&modes[j], target);
        for (p, m) in projected.iter_mut().zip(&modes[j]) {
            *p += overlap * m;
        }
    }
    let pnorm = norm2(&projected);
    if pnorm <= 1e-12 * norm2(target).max(1e-300) {
        return;
    }
    let mut new_basis: Vec<Vec<f64>> = vec![projected.iter().map(|x| x / pnorm).collect()];
    for &j in cluster {
        let mut w = modes[j].clone();
        for q in &new_basis {
            let overlap = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= overlap * qi;
            }
        }
        let wn = norm2(&w);
        if wn > 1e-8 {
            new_basis.push(w.iter().map(|x| x / wn).collect());
        }
        if new_basis.len() == cluster.len() {
            break;
        }
    }
    for (slot, basis_vec) in cluster.iter().zip(new_basis) {
        modes[*slot] = basis_vec;
    }
}

/// A dephasing code: per-qubit Z-expectation profile, mixing angles, gain,
/// the uncorrected mode (when one is deliberately left), and the code.
#[derive(Debug, Clone)]
pub struct QubitDesign {
    /// Per-qubit logical Z expectation, `profile_j = <0_L|Z_j|0_L>`.
    pub profile: Vec<f64>,
    /// Mixing angles, `profile = cos(2 angles)` element-wise.
    pub angles: Vec<f64>,
    /// Adjustable gain used to build the profile.
    pub gain: f64,
    /// Index of the noise mode left uncorrected, when the design targets one.
    pub uncorrected: Option<usize>,
    pub code: CodePair,
    /// Achieved QFI coefficient `F(t)/t^2 = <gaps, profile>^2`.
    pub qfi_coefficient: f64,
}

fn snap_unit(b: f64) -> f64 {
    let clamped = b.clamp(-1.0, 1.0);
    if 1.0 - clamped.abs() <= 1e-14 {
        clamped.signum()
    } else {
        clamped
    }
}

fn design_from_profile(
    gaps: &[f64],
    profile: Vec<f64>,
    gain: f64,
    uncorrected: Option<usize>,
) -> Result<QubitDesign, DephasingError> {
    let code = phase_code(&profile)?;
    let signal = dot(gaps, &profile);
    let angles = profile.iter().map(|b| 0.5 * snap_unit(*b).acos()).collect();
    Ok(QubitDesign {
        profile,
        angles,
        gain,
        uncorrected,
        code,
        qfi_coefficient: signal * signal,
    })
}

/// Optimal dephasing code from the l-infinity design program.
pub fn design_exact(cm: &CorrelationModel) -> Result<(QubitDesign, LpSolution), DephasingError> {
    if cm.qubits() < 3 {
        return Err(DephasingError::NTooSmall {
            qubits: cm.qubits(),
        });
    }
    let modes = decompose_modes(cm)?;
    if !modes.hnls_holds(cm.gaps()) {
        return Err(DephasingError::HnlsViolated);
    }
    let program = LInfBallProgram::new(cm.gaps().to_vec(), modes.column_space())?;
    let solution = solve_linf(&program)?;
    let design = design_from_profile(cm.gaps(), solution.argmax.clone(), 1.0, None)?;
    Ok((design, solution))
}

/// Approximate dephasing code: profile proportional to the kernel
/// projection of the gap vector, scaled by `gain`.
///
/// The gain may be any value with `0 < |gain| <= 1 / |proj|_inf`; the code
/// always corrects the column space exactly, trading only signal strength.
pub fn design_approx(cm: &CorrelationModel, gain: f64) -> Result<QubitDesign, DephasingError> {
    if cm.qubits() < 3 {
        return Err(DephasingError::NTooSmall {
            qubits: cm.qubits(),
        });
    }
    let modes = decompose_modes(cm)?;
    let projection = modes.kernel_projection(cm.gaps());
    let inf_norm = norm_inf(&projection);
    if inf_norm <= 1e-12 * norm2(cm.gaps()).max(1e-300) {
        return Err(DephasingError::HnlsViolated);
    }
    let gain_max = 1.0 / inf_norm;
    if gain == 0.0 || !gain.is_finite() || gain.abs() > gain_max * (1.0 + 1e-12) {
        return Err(DephasingError::GammaOutOfRange {
            gamma: gain,
            max: gain_max,
        });
    }
    let profile: Vec<f64> = projection.iter().map(|p| gain * p).collect();
    design_from_profile(cm.gaps(), profile, gain, None)
}

/// Largest admissible gain for [`design_approx`].
pub fn approx_gain_max(cm: &CorrelationModel) -> Result<f64, DephasingError> {
    let modes = decompose_modes(cm)?;
    let projection = modes.kernel_projection(cm.gaps());
    let inf_norm = norm_inf(&projection);
    if inf_norm <= 1e-12 * norm2(cm.gaps()).max(1e-300) {
        return Err(DephasingError::HnlsViolated);
    }
    Ok(1.0 / inf_norm)
}

/// Dephasing code that leaves one (typically subdominant) noise mode
/// uncorrected and accumulates signal through it.
///
/// `mode` and `gain` default to the sensitivity-optimal mode and the
/// largest admissible gain.
pub fn design_beyond_hnls(
    cm: &CorrelationModel,
    gain: Option<f64>,
    mode: Option<usize>,
) -> Result<QubitDesign, DephasingError> {
    if cm.qubits() < 3 {
        return Err(DephasingError::NTooSmall {
            qubits: cm.qubits(),
        });
    }
    let modes = decompose_modes(cm)?;
    let u = match mode {
        Some(u) => {
            if u >= cm.qubits() {
                return Err(DephasingError::Invariant(format!(
                    "mode index {u} out of range for {} modes",
                    cm.qubits()
                )));
            }
            u
        }
        None => best_uncorrected_mode(&modes, cm.gaps())?,
    };
    let direction = modes.mode(u).to_vec();
    let gain_max = 1.0 / norm_inf(&direction);
    let gamma = gain.unwrap_or(gain_max);
    if !(gamma > 0.0) || !gamma.is_finite() || gamma > gain_max * (1.0 + 1e-12) {
        return Err(DephasingError::GammaOutOfRange {
            gamma,
            max: gain_max,
        });
    }
    let profile: Vec<f64> = direction.iter().map(|v| gamma * v).collect();
    design_from_profile(cm.gaps(), profile, gamma, Some(u))
}

/// Mode minimizing `sqrt(lambda) / |v . gaps|`; ties prefer the smaller
/// eigenvalue, then the lower index.
fn best_uncorrected_mode(modes: &NoiseModes, gaps: &[f64]) -> Result<usize, DephasingError> {
    let overlap_tol = 1e-10 * norm2(gaps).max(1e-300);
    let mut best: Option<(f64, f64, usize)> = None;
    for j in 0..modes.qubits() {
        let overlap = dot(modes.mode(j), gaps).abs();
        if overlap <= overlap_tol {
            continue;
        }
        let score = modes.eigenvalues()[j].sqrt() / overlap;
        let candidate = (score, modes.eigenvalues()[j], j);
        best = Some(match best {
            None => candidate,
            Some(current) => {
                if candidate.0 < current.0 - 1e-15
                    || (close(candidate.0, current.0) && candidate.1 < current.1 - 1e-15)
                    || (close(candidate.0, current.0)
                        && close(candidate.1, current.1)
                        && candidate.2 < current.2)
                {
                    candidate
                } else {
                    current
                }
            }
        });
    }
    best.map(|(_, _, j)| j)
        .ok_or(DephasingError::AllModesOrthogonal)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Sensitivities of the available schemes on one model, all in units fixed
/// by the dephasing time.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityReport {
    /// Single physical qubit.
    pub eta_single: f64,
    /// N unentangled qubits in parallel.
    pub eta_parallel: f64,
    /// GHZ probe over the same N qubits.
    pub eta_ghz: f64,
    /// Error-corrected scheme with the optimal uncorrected mode.
    pub eta_qec: f64,
    pub best_mode: usize,
    pub hnls: bool,
    /// A vanishing noise mode carries signal: the QEC sensitivity is zero
    /// in the frequent-recovery limit.
    pub heisenberg_regime: bool,
    /// Whether the gap vector is uniform; the single/parallel baselines
    /// assume unit gaps.
    pub uniform_gaps: bool,
}

/// Compare single-qubit, parallel, GHZ, and QEC sensitivities.
pub fn sensitivity_report(cm: &CorrelationModel) -> Result<SensitivityReport, DephasingError> {
    let modes = decompose_modes(cm)?;
    let n = cm.qubits();
    let base = (2.0 * std::f64::consts::E / cm.t2()).sqrt();
    let eta_single = base;
    let eta_parallel = base / (n as f64).sqrt();

    // |D^{1/2} V^T gaps|_2 / N
    let mut ghz_sq = 0.0;
    for j in 0..n {
        let overlap = dot(modes.mode(j), cm.gaps());
        ghz_sq += modes.eigenvalues()[j] * overlap * overlap;
    }
    let eta_ghz = ghz_sq.sqrt() / n as f64 * base;

    let overlap_tol = 1e-10 * norm2(cm.gaps()).max(1e-300);
    let tol = modes.rank_tolerance();
    let mut heisenberg = false;
    let mut best: Option<(f64, f64, usize)> = None; // (score, lambda, index), minimized
    for j in 0..n {
        let overlap = dot(modes.mode(j), cm.gaps()).abs();
        if overlap <= overlap_tol {
            continue;
        }
        let lambda = modes.eigenvalues()[j];
        let score = if lambda <= tol {
            heisenberg = true;
            0.0
        } else {
            lambda.sqrt() / overlap
        };
        let candidate = (score, lambda, j);
        best = Some(match best {
            None => candidate,
            Some(current) => {
                if candidate.0 < current.0 - 1e-15
                    || (close(candidate.0, current.0) && candidate.1 < current.1 - 1e-15)
                    || (close(candidate.0, current.0)
                        && close(candidate.1, current.1)
                        && candidate.2 < current.2)
                {
                    candidate
                } else {
                    current
                }
            }
        });
    }
    let (best_score, _, best_mode) = best.ok_or(DephasingError::AllModesOrthogonal)?;
    let eta_qec = if heisenberg { 0.0 } else { best_score * base };
    let uniform_gaps = cm.gaps().iter().all(|g| (g - 1.0).abs() <= 1e-12);
    Ok(SensitivityReport {
        eta_single,
        eta_parallel,
        eta_ghz,
        eta_qec,
        best_mode,
        hnls: modes.hnls_holds(cm.gaps()),
        heisenberg_regime: heisenberg,
        uniform_gaps,
    })
}

/// Ring of N qubits whose noise correlation depends only on distance:
/// `C_jk = alpha_dist(j,k)` with `alpha_0 = 1` and unit gaps.
pub fn ring_model(
    qubits: usize,
    alpha: &[f64],
    t2: f64,
) -> Result<CorrelationModel, DephasingError> {
    if qubits < 3 {
        return Err(DephasingError::NTooSmall { qubits });
    }
    let expected = qubits / 2;
    if alpha.len() != expected {
        return Err(DephasingError::WrongAlphaCount {
            qubits,
            expected,
            actual: alpha.len(),
        });
    }
    let c = DenseMatrix::from_fn(qubits, qubits, |i, j| {
        let raw = (i as isize - j as isize).unsigned_abs();
        let dist = raw.min(qubits - raw);
        Complex64::new(if dist == 0 { 1.0 } else { alpha[dist - 1] }, 0.0)
    });
    CorrelationModel::new(vec![1.0; qubits], c, t2)
}

/// Materialize the dephasing dynamics as a Lindblad model on 2^N levels:
/// `H = gaps . Z / 2` with one jump per non-vanishing noise mode at rate
/// `1/(2 T2)`.
pub fn lindblad_model(cm: &CorrelationModel) -> Result<LindbladModel, DephasingError> {
    let modes = decompose_modes(cm)?;
    let half_gaps: Vec<f64> = cm.gaps().iter().map(|g| 0.5 * g).collect();
    let h = weighted_z(cm.qubits(), &half_gaps);
    let tol = modes.rank_tolerance();
    let mut jumps = Vec::new();
    let mut rates = Vec::new();
    for j in 0..cm.qubits() {
        if modes.eigenvalues()[j] > tol {
            jumps.push(modes.jump_operator(j));
            rates.push(1.0 / (2.0 * cm.t2()));
        }
    }
    Ok(LindbladModel::new(h, jumps, rates)?)
}

/// The product code with `|0_L> = prod_j (cos(theta_j)|0> + i sin(theta_j)|1>)`
/// and `|1_L>` its bit-flip; `profile = cos(2 theta)`.
pub fn phase_code(profile: &[f64]) -> Result<CodePair, DephasingError> {
    let n = profile.len();
    if n == 0 {
        return Err(DephasingError::Invariant("empty profile".into()));
    }
    for &b in profile {
        if b.abs() > 1.0 + 1e-9 {
            return Err(DephasingError::Invariant(format!(
                "profile entry {b} outside [-1, 1]"
            )));
        }
    }
    // Snap entries that sit at the boundary up to roundoff: the arccos
    // would otherwise turn an eps-level profile error into sqrt(eps)-level
    // spurious amplitudes on the pinned qubits.
    let angles: Vec<f64> = profile.iter().map(|b| 0.5 * snap_unit(*b).acos()).collect();
    let dim = 1usize << n;
    let mut ket0 = vec![Complex64::new(1.0, 0.0); dim];
    for (q, theta) in angles.iter().enumerate() {
        let c0 = Complex64::new(theta.cos(), 0.0);
        let c1 = Complex64::new(0.0, theta.sin());
        for (index, amp) in ket0.iter_mut().enumerate() {
            *amp *= if bit(index, q, n) == 0 { c0 } else { c1 };
        }
    }
    let mask = dim - 1;
    let ket1: Vec<Complex64> = (0..dim).map(|index| ket0[index ^ mask]).collect();
    Ok(CodePair::new(ket0, ket1)?)
}

/// Qubit `q` of an N-qubit register maps to bit `n-1-q` of the basis index,
/// so qubit 0 is the leftmost tensor factor.
fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// Diagonal of `Z_q` on the full register.
pub fn z_diagonal(n: usize, qubit: usize) -> Vec<f64> {
    (0..1usize << n)
        .map(|index| if bit(index, qubit, n) == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Dense diagonal matrix of `sum_q weights_q Z_q`.
pub fn weighted_z(n: usize, weights: &[f64]) -> DenseMatrix {
    let dim = 1usize << n;
    let mut diag = vec![0.0; dim];
    for (q, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (index, d) in diag.iter_mut().enumerate() {
            *d += if bit(index, q, n) == 0 { w } else { -w };
        }
    }
    DenseMatrix::real_diagonal(&diag)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
