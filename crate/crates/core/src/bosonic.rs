//! Chebyshev and binomial codes for a lossy bosonic mode.
//!
//! The sensor is a single mode with boson loss, truncated at a maximal
//! occupation M, sensing the coefficient of the s-th power of the number
//! operator. Lower number-operator powers are indistinguishable nuisance
//! signals, so the noise span to correct is `{I, a, a^dag, (a^dag a)^i}`
//! for `i < s`. Codes supported on well-separated Fock levels correct the
//! off-diagonal loss part; the level populations must then filter the
//! diagonal nuisance powers while keeping the s-th power visible, which is
//! a minimax polynomial problem solved by Chebyshev extrema.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{solve_linear, DenseMatrix, LinalgError};
use crate::lp::{solve_l1, L1BallProgram, LpError};
use crate::model::{CodePair, DesignResult, LindbladSpan, ModelError};

#[derive(Debug, Clone, Error)]
pub enum BosonicError {
    #[error("truncation too small: {reason}")]
    TruncationTooSmall { reason: String },
    #[error("truncation {truncation} is not divisible by the signal order {order}")]
    NotDivisible { truncation: usize, order: usize },
    #[error("signal order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("signal order {0} outside the supported range 2..=12")]
    OrderOutOfRange(usize),
    #[error("no feasible code: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Truncated lossy bosonic mode sensing the s-th number-operator power.
#[derive(Debug, Clone)]
pub struct FockModel {
    /// Maximal boson number M; the space has dimension M + 1.
    truncation: usize,
    /// Signal order s >= 2; the estimand multiplies `(a^dag a)^s`.
    signal_order: usize,
    /// Boson loss rate.
    loss_rate: f64,
    /// Coefficients of the number-operator powers 1..=s; the last entry is
    /// the estimand and is kept symbolic in the designs.
    hamiltonian_coeffs: Vec<f64>,
}

impl FockModel {
    pub fn new(
        truncation: usize,
        signal_order: usize,
        loss_rate: f64,
        hamiltonian_coeffs: Vec<f64>,
    ) -> Result<Self, BosonicError> {
        if signal_order < 2 {
            return Err(BosonicError::OrderTooSmall(signal_order));
        }
        if truncation < 1 {
            return Err(BosonicError::TruncationTooSmall {
                reason: "maximal boson number must be at least 1".into(),
            });
        }
        if hamiltonian_coeffs.len() != signal_order {
            return Err(BosonicError::Infeasible(format!(
                "expected {signal_order} hamiltonian coefficients, got {}",
                hamiltonian_coeffs.len()
            )));
        }
        Ok(Self {
            truncation,
            signal_order,
            loss_rate,
            hamiltonian_coeffs,
        })
    }

    /// Model with zeroed nuisance coefficients (they do not affect code
    /// construction).
    pub fn plain(truncation: usize, signal_order: usize, loss_rate: f64) -> Result<Self, BosonicError> {
        let coeffs = vec![0.0; signal_order];
        Self::new(truncation, signal_order, loss_rate, coeffs)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn signal_order(&self) -> usize {
        self.signal_order
    }

    pub fn loss_rate(&self) -> f64 {
        self.loss_rate
    }

    pub fn hamiltonian_coeffs(&self) -> &[f64] {
        &self.hamiltonian_coeffs
    }

    pub fn dimension(&self) -> usize {
        self.truncation + 1
    }

    /// Annihilation operator on the truncated space.
    pub fn annihilation(&self) -> DenseMatrix {
        let d = self.dimension();
        DenseMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `(a^dag a)^power` as a diagonal matrix.
    pub fn number_power(&self, power: usize) -> DenseMatrix {
        let d = self.dimension();
        let diag: Vec<f64> = (0..d).map(|k| (k as f64).powi(power as i32)).collect();
        DenseMatrix::real_diagonal(&diag)
    }

    /// The signal operator `(a^dag a)^s`.
    pub fn signal_operator(&self) -> DenseMatrix {
        self.number_power(self.signal_order)
    }

    /// Combined loss-plus-gain budget the order-s code could correct as a
    /// memory, `floor(M/2 sin^2(pi/s) - 1)`. Informational: the designs
    /// here only enforce the single loss/gain distance.
    pub fn loss_gain_capacity(&self) -> usize {
        let half = self.truncation as f64 / 2.0
            * (std::f64::consts::PI / self.signal_order as f64).sin().powi(2);
        (half - 1.0).max(0.0).floor() as usize
    }
}

/// Span to correct: `{I, a, a^dag, (a^dag a)^i for 1 <= i <= s-1}`,
/// materialized on the truncated space.
///
/// The loss is not a commuting error, but recoveries performed in the
/// rotating frame of the nuisance powers relax the required recovery
/// frequency by a factor of M; the spans and codes here are unchanged by
/// that frame choice.
pub fn bosonic_span(model: &FockModel) -> LindbladSpan {
    let mut generators = vec![DenseMatrix::identity(model.dimension())];
    generators.push(model.annihilation());
    for i in 1..model.signal_order() {
        generators.push(model.number_power(i));
    }
    LindbladSpan::from_generators(model.dimension(), generators)
}

/// Fock support levels of the order-s code: `floor(M sin^2(k pi / 2s))`.
///
/// Values within rounding of an integer snap to it, so exactly expressible
/// extrema (like M/2 at s = 2) stay exact.
fn support_levels(truncation: usize, order: usize) -> Vec<usize> {
    (0..=order)
        .map(|k| {
            let x = truncation as f64
                * (k as f64 * std::f64::consts::PI / (2.0 * order as f64)).sin().powi(2);
            (x + 1e-9).floor() as usize
        })
        .collect()
}

/// The Chebyshev code: populations on the extrema of a rescaled Chebyshev
/// polynomial, split between the logical states by parity.
#[derive(Debug, Clone)]
pub struct ChebyshevCode {
    /// Fock levels carrying population, parity-alternating.
    pub support_points: Vec<usize>,
    /// Squared amplitudes per support point; even entries sum to 1 and odd
    /// entries sum to 1.
    pub weights: Vec<f64>,
    pub code: CodePair,
}

impl ChebyshevCode {
    /// Signal visibility `<0|(n)^s|0> - <1|(n)^s|1>` in magnitude.
    pub fn signal_strength(&self, model: &FockModel) -> f64 {
        signed_signal(&self.support_points, &self.weights, model.signal_order()).abs()
    }
}

fn signed_signal(points: &[usize], weights: &[f64], order: usize) -> f64 {
    points
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(k, (&m, &w))| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * w * (m as f64).powi(order as i32)
        })
        .sum()
}

/// Construct the order-s Chebyshev code on the truncated space.
pub fn chebyshev_code(model: &FockModel) -> Result<ChebyshevCode, BosonicError> {
    let s = model.signal_order();
    let m = model.truncation();
    let min_gap_bound = m as f64 * (std::f64::consts::PI / s as f64).sin().powi(2);
    if min_gap_bound < 4.0 {
        return Err(BosonicError::TruncationTooSmall {
            reason: format!(
                "M sin^2(pi/s) = {min_gap_bound:.3} < 4, single loss/gain not correctable"
            ),
        });
    }
    let points = support_levels(m, s);
    for pair in points.windows(2) {
        if pair[1] <= pair[0] || pair[1] - pair[0] < 3 {
            return Err(BosonicError::TruncationTooSmall {
                reason: format!(
                    "support levels {} and {} closer than distance 3",
                    pair[0], pair[1]
                ),
            });
        }
    }

    let weights = solve_weights(&points, m, s)?;
    if weights.iter().any(|&w| w <= 0.0) {
        return Err(BosonicError::TruncationTooSmall {
            reason: "weight system produced non-positive populations".into(),
        });
    }

    let code = code_from_supports(model.dimension(), &points, &weights)?;
    Ok(ChebyshevCode {
        support_points: points,
        weights,
        code,
    })
}

/// Solve the (s+1) x (s+1) system fixing the populations: signed powers
/// `(m_k / M)^i` vanish for i = 0..s-1 (with 0^0 = 1), total population 2.
fn solve_weights(points: &[usize], truncation: usize, order: usize) -> Result<Vec<f64>, BosonicError> {
    let n = order + 1;
    let mut rows = Vec::with_capacity(n);
    for i in 0..order {
        let mut row = Vec::with_capacity(n);
        for (k, &mk) in points.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let ratio = mk as f64 / truncation as f64;
            let value = if i == 0 { 1.0 } else { ratio.powi(i as i32) };
            row.push(sign * value);
        }
        rows.push(row);
    }
    rows.push(vec![1.0; n]);
    let matrix = DenseMatrix::from_real_rows(&rows)?;
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[n - 1] = Complex64::new(2.0, 0.0);
    let solution = solve_linear(&matrix, &rhs).map_err(|e| match e {
        LinalgError::Singular { .. } => BosonicError::TruncationTooSmall {
            reason: "support levels collide, weight system is singular".into(),
        },
        other => BosonicError::Linalg(other),
    })?;
    Ok(solution.into_iter().map(|z| z.re).collect())
}

fn code_from_supports(
    dimension: usize,
    points: &[usize],
    weights: &[f64],
) -> Result<CodePair, BosonicError> {
    let mut ket0 = vec![Complex64::new(0.0, 0.0); dimension];
    let mut ket1 = vec![Complex64::new(0.0, 0.0); dimension];
    for (k, (&level, &weight)) in points.iter().zip(weights).enumerate() {
        let amp = Complex64::new(weight.max(0.0).sqrt(), 0.0);
        if k % 2 == 0 {
            ket0[level] = amp;
        } else {
            ket1[level] = amp;
        }
    }
    Ok(CodePair::new(ket0, ket1)?)
}

/// Achieved QFI coefficient against the minimax optimum.
#[derive(Debug, Clone, Copy)]
pub struct QfiComparison {
    /// `F(t)/t^2` of the code.
    pub qfi_coefficient: f64,
    /// Upper bound `16 (M/4)^{2s}` on the optimal coefficient.
    pub optimal_bound: f64,
    /// `qfi_coefficient / optimal_bound`, in (0, 1].
    pub ratio: f64,
}

/// Compare the Chebyshev code's QFI coefficient with the minimax bound.
pub fn chebyshev_qfi(code: &ChebyshevCode, model: &FockModel) -> QfiComparison {
    let signal = code.signal_strength(model);
    let qfi_coefficient = signal * signal;
    let m = model.truncation() as f64;
    let optimal_bound = 16.0 * (m / 4.0).powi(2 * model.signal_order() as i32);
    QfiComparison {
        qfi_coefficient,
        optimal_bound,
        ratio: qfi_coefficient / optimal_bound,
    }
}

/// Exact-extrema identities behind the Chebyshev construction.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub order: usize,
    /// `sum_k (-1)^k w_k sin^{2i}(k pi/2s)` for i = 1..s-1; all must vanish.
    pub filtered_residuals: Vec<f64>,
    /// The same sum at i = s.
    pub signal_value: f64,
    /// `(-1)^s / 2^{2s-2}`.
    pub expected_signal: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        let filter = self
            .filtered_residuals
            .iter()
            .fold(0.0f64, |acc, r| acc.max(r.abs()));
        filter.max((self.signal_value - self.expected_signal).abs())
    }
}

/// Evaluate the asymptotic-weight identities for an order in 2..=12.
///
/// With weights `2/s` (halved at the endpoints), the signed power sums over
/// the Chebyshev extrema vanish below order s and equal `(-1)^s/2^{2s-2}`
/// at order s.
pub fn lemma1_check(order: usize) -> Result<IdentityReport, BosonicError> {
    if !(2..=12).contains(&order) {
        return Err(BosonicError::OrderOutOfRange(order));
    }
    let s = order as f64;
    let weights: Vec<f64> = (0..=order)
        .map(|k| {
            let mut w = 2.0 / s;
            if k == 0 || k == order {
                w -= 1.0 / s;
            }
            w
        })
        .collect();
    let sum_at = |i: u32| -> f64 {
        (0..=order)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let sin2 = (k as f64 * std::f64::consts::PI / (2.0 * s)).sin().powi(2);
                sign * weights[k] * sin2.powi(i as i32)
            })
            .sum()
    };
    let filtered_residuals: Vec<f64> = (1..order as u32).map(sum_at).collect();
    let signal_value = sum_at(order as u32);
    let expected_signal = if order % 2 == 0 { 1.0 } else { -1.0 }
        / 2.0f64.powi(2 * order as i32 - 2);
    Ok(IdentityReport {
        order,
        filtered_residuals,
        signal_value,
        expected_signal,
    })
}

/// The order-s binomial code on equispaced levels `k M / s` with
/// binomial-coefficient populations.
pub fn binomial_code(model: &FockModel) -> Result<CodePair, BosonicError> {
    let s = model.signal_order();
    let m = model.truncation();
    if m % s != 0 {
        return Err(BosonicError::NotDivisible {
            truncation: m,
            order: s,
        });
    }
    let spacing = m / s;
    if spacing < 2 {
        return Err(BosonicError::TruncationTooSmall {
            reason: format!("level spacing M/s = {spacing} below the code distance"),
        });
    }
    let points: Vec<usize> = (0..=s).map(|k| k * spacing).collect();
    let norm = 2.0f64.powi(s as i32 - 1);
    let weights: Vec<f64> = (0..=s).map(|k| binomial(s, k) / norm).collect();
    code_from_supports(model.dimension(), &points, &weights)
}

/// Signal visibility of the binomial code, `s! M^s / (2^{s-1} s^s)`.
pub fn binomial_signal(model: &FockModel) -> Result<f64, BosonicError> {
    let s = model.signal_order();
    let m = model.truncation();
    if m % s != 0 {
        return Err(BosonicError::NotDivisible {
            truncation: m,
            order: s,
        });
    }
    let spacing = m / s;
    let points: Vec<usize> = (0..=s).map(|k| k * spacing).collect();
    let norm = 2.0f64.powi(s as i32 - 1);
    let weights: Vec<f64> = (0..=s).map(|k| binomial(s, k) / norm).collect();
    Ok(signed_signal(&points, &weights, s).abs())
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..k {
        out *= (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// LP-designed diagonal code over Fock populations with the support
/// distance enforced after the fact.
#[derive(Debug, Clone)]
pub struct LpCodeDesign {
    pub design: DesignResult,
    /// Objective of the unrestricted LP (no distance constraint).
    pub unrestricted_objective: f64,
    /// Whether the support-distance pass removed any levels.
    pub restricted: bool,
}

/// Solve the diagonal design program over Fock populations: objective
/// `k^s`, span rows `{1, k, ..., k^{s-1}}` (rescaled), distance-3 supports
/// enforced by pruning and re-solving on the restricted level set.
pub fn lp_code_bosonic(model: &FockModel) -> Result<LpCodeDesign, BosonicError> {
    if model.truncation() > 200 {
        return Err(BosonicError::Infeasible(
            "LP design supported up to M = 200".into(),
        ));
    }
    let d = model.dimension();
    let s = model.signal_order();
    let scale = model.truncation() as f64;
    let objective: Vec<f64> = (0..d).map(|k| (k as f64 / scale).powi(s as i32)).collect();
    let span_rows: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            (0..d)
                .map(|k| {
                    if i == 0 {
                        1.0
                    } else {
                        (k as f64 / scale).powi(i as i32)
                    }
                })
                .collect()
        })
        .collect();

    let mut allowed: Vec<bool> = vec![true; d];
    let mut unrestricted_objective = None;
    let mut restricted = false;
    // Prune supports violating the distance requirement (smallest weight
    // first) and re-solve on the remaining levels.
    for _round in 0..d {
        let solution = solve_masked(&objective, &span_rows, &allowed)?;
        if unrestricted_objective.is_none() {
            unrestricted_objective = Some(solution.objective_value);
        }
        if solution.objective_value <= 1e-9 {
            return Err(BosonicError::Infeasible(
                "design program collapsed to zero signal".into(),
            ));
        }
        let support: Vec<usize> = (0..d)
            .filter(|&k| solution.argmax[k].abs() > 1e-9)
            .collect();
        let violation = support
            .windows(2)
            .find(|pair| pair[1] - pair[0] < 3)
            .map(|pair| {
                if solution.argmax[pair[0]].abs() <= solution.argmax[pair[1]].abs() {
                    pair[0]
                } else {
                    pair[1]
                }
            });
        match violation {
            Some(level) => {
                allowed[level] = false;
                restricted = true;
            }
            None => {
                let signal_scale = scale.powi(s as i32);
                let mut amp0 = vec![Complex64::new(0.0, 0.0); d];
                let mut amp1 = vec![Complex64::new(0.0, 0.0); d];
                for (k, &b) in solution.argmax.iter().enumerate() {
                    if b > 0.0 {
                        amp0[k] = Complex64::new(b.sqrt(), 0.0);
                    } else if b < 0.0 {
                        amp1[k] = Complex64::new((-b).sqrt(), 0.0);
                    }
                }
                normalize(&mut amp0);
                normalize(&mut amp1);
                let code = CodePair::new(amp0, amp1)?;
                let signal = solution.objective_value * signal_scale;
                let design = DesignResult {
                    code,
                    design_vector: solution.argmax.clone(),
                    qfi_coefficient: signal * signal,
                    lp: solution,
                };
                return Ok(LpCodeDesign {
                    design,
                    unrestricted_objective: unrestricted_objective.unwrap() * signal_scale,
                    restricted,
                });
            }
        }
    }
    Err(BosonicError::Infeasible(
        "distance restriction removed every support".into(),
    ))
}

fn solve_masked(
    objective: &[f64],
    span_rows: &[Vec<f64>],
    allowed: &[bool],
) -> Result<crate::lp::LpSolution, BosonicError> {
    let keep: Vec<usize> = (0..allowed.len()).filter(|&k| allowed[k]).collect();
    let obj: Vec<f64> = keep.iter().map(|&k| objective[k]).collect();
    let rows: Vec<Vec<f64>> = span_rows
        .iter()
        .map(|row| keep.iter().map(|&k| row[k]).collect())
        .collect();
    let program = L1BallProgram::new(obj, rows, 2.0)?;
    let masked = solve_l1(&program)?;
    let mut argmax = vec![0.0; allowed.len()];
    for (i, &k) in keep.iter().enumerate() {
        argmax[k] = masked.argmax[i];
    }
    Ok(crate::lp::LpSolution {
        argmax,
        objective_value: masked.objective_value,
        dual_value: masked.dual_value,
    })
}

fn normalize(v: &mut [Complex64]) {
    let norm = crate::linalg::vec_norm(v);
    if norm > 0.0 {
        let inv = Complex64::new(1.0 / norm, 0.0);
        for z in v.iter_mut() {
            *z *= inv;
        }
    }
}
