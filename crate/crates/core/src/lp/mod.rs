//! Exact linear programs behind the code designs.
//!
//! Two programs appear throughout: maximizing a linear functional over the
//! l1 ball subject to orthogonality against a span (the commuting-noise
//! design program), and the same over the l-infinity ball (the qubit
//! dephasing design program). Both are solved exactly at vertices by a
//! dense simplex method; a brute-force vertex enumeration oracle provides
//! an independent check for the test suites.

mod brute;
mod simplex;

pub use brute::{brute_force_lp, LpProgram};
use brute::brute_force_standard;

use simplex::{solve_standard, StandardForm};
use thiserror::Error;

/// Tolerance for the strong-duality certificate carried by [`LpSolution`].
const DUALITY_TOL: f64 = 1e-8;
/// Tolerance for primal feasibility of returned vertices.
const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("program is infeasible")]
    Infeasible,
    #[error("program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
    #[error("equality rows must span the all-ones vector")]
    OnesNotInSpan,
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("instance too large for brute-force enumeration: {0}")]
    TooLarge(String),
    #[error("dual multipliers could not be recovered")]
    DegenerateDuals,
    #[error("duality gap {gap:.3e} exceeds certificate tolerance")]
    DualityGap { gap: f64 },
    #[error("returned vertex violates primal feasibility by {violation:.3e}")]
    InfeasibleVertex { violation: f64 },
}

/// Maximize `<x, objective>` over `|x|_1 <= radius` with `<x, row> = 0` for
/// every equality row.
#[derive(Debug, Clone)]
pub struct L1BallProgram {
    objective: Vec<f64>,
    equality_rows: Vec<Vec<f64>>,
    radius: f64,
    /// Orthonormalized equality rows (same span, full rank).
    ortho_rows: Vec<Vec<f64>>,
}

impl L1BallProgram {
    pub fn new(
        objective: Vec<f64>,
        equality_rows: Vec<Vec<f64>>,
        radius: f64,
    ) -> Result<Self, LpError> {
        let d = objective.len();
        for row in &equality_rows {
            if row.len() != d {
                return Err(LpError::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
        }
        if !(radius > 0.0) {
            return Err(LpError::BadRadius(radius));
        }
        let ortho_rows = orthonormal_real(&equality_rows);
        // The identity is always in the Lindblad span, so the all-ones
        // vector must lie in the diagonal span.
        let ones = vec![1.0; d];
        let residual = residual_norm(&ones, &ortho_rows);
        if residual > 1e-9 * (d as f64).sqrt() {
            return Err(LpError::OnesNotInSpan);
        }
        Ok(Self {
            objective,
            equality_rows,
            radius,
            ortho_rows,
        })
    }

    pub fn dimension(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn equality_rows(&self) -> &[Vec<f64>] {
        &self.equality_rows
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn standard_form(&self) -> StandardForm {
        // split x = p - q with p, q >= 0 and sum(p + q) + slack = radius
        let d = self.dimension();
        let r = self.ortho_rows.len();
        let n = 2 * d + 1;
        let mut a = Vec::with_capacity(r + 1);
        for row in &self.ortho_rows {
            let mut constraint = vec![0.0; n];
            for i in 0..d {
                constraint[i] = row[i];
                constraint[d + i] = -row[i];
            }
            a.push(constraint);
        }
        let mut budget = vec![1.0; 2 * d];
        budget.push(1.0);
        a.push(budget);
        let mut b = vec![0.0; r];
        b.push(self.radius);
        let mut c = vec![0.0; n];
        for i in 0..d {
            c[i] = self.objective[i];
            c[d + i] = -self.objective[i];
        }
        StandardForm { a, b, c }
    }

    fn extract(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dimension();
        (0..d).map(|i| x[i] - x[d + i]).collect()
    }

    fn check_feasible(&self, v: &[f64]) -> Result<(), LpError> {
        let l1: f64 = v.iter().map(|x| x.abs()).sum();
        let mut violation = (l1 - self.radius).max(0.0);
        for row in &self.ortho_rows {
            let dot: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            violation = violation.max(dot.abs());
        }
        if violation > FEASIBILITY_TOL {
            return Err(LpError::InfeasibleVertex { violation });
        }
        Ok(())
    }
}

/// Maximize `<x, objective>` over `|x|_inf <= 1` with `x` orthogonal to the
/// given column space.
#[derive(Debug, Clone)]
pub struct LInfBallProgram {
    objective: Vec<f64>,
    orthogonality_space: Vec<Vec<f64>>,
    ortho_rows: Vec<Vec<f64>>,
}

impl LInfBallProgram {
    pub fn new(
        objective: Vec<f64>,
        orthogonality_space: Vec<Vec<f64>>,
    ) -> Result<Self, LpError> {
        let d = objective.len();
        for row in &orthogonality_space {
            if row.len() != d {
                return Err(LpError::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
        }
        let ortho_rows = orthonormal_real(&orthogonality_space);
        Ok(Self {
            objective,
            orthogonality_space,
            ortho_rows,
        })
    }

    pub fn dimension(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn orthogonality_space(&self) -> &[Vec<f64>] {
        &self.orthogonality_space
    }

    /// Standard form under the shift x = u - 1 with 0 <= u <= 2, plus the
    /// constant subtracted from the shifted objective.
    fn standard_form(&self) -> (StandardForm, f64) {
        let d = self.dimension();
        let r = self.ortho_rows.len();
        let n = 2 * d;
        let mut a = Vec::with_capacity(d + r);
        let mut b = Vec::with_capacity(d + r);
        for i in 0..d {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row[d + i] = 1.0;
            a.push(row);
            b.push(2.0);
        }
        for v in &self.ortho_rows {
            let mut row = vec![0.0; n];
            row[..d].copy_from_slice(v);
            a.push(row);
            b.push(v.iter().sum::<f64>());
        }
        let mut c = vec![0.0; n];
        c[..d].copy_from_slice(&self.objective);
        let shift: f64 = self.objective.iter().sum();
        (StandardForm { a, b, c }, shift)
    }

    fn extract(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dimension()).map(|i| x[i] - 1.0).collect()
    }

    fn check_feasible(&self, v: &[f64]) -> Result<(), LpError> {
        let linf = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut violation = (linf - 1.0).max(0.0);
        for row in &self.ortho_rows {
            let dot: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            violation = violation.max(dot.abs());
        }
        if violation > FEASIBILITY_TOL {
            return Err(LpError::InfeasibleVertex { violation });
        }
        Ok(())
    }
}

/// Optimal vertex with its strong-duality certificate.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub argmax: Vec<f64>,
    pub objective_value: f64,
    pub dual_value: f64,
}

impl LpSolution {
    fn certify(self) -> Result<Self, LpError> {
        let gap = (self.objective_value - self.dual_value).abs();
        if gap > DUALITY_TOL * (1.0 + self.objective_value.abs()) {
            return Err(LpError::DualityGap { gap });
        }
        Ok(self)
    }
}

/// Solve the l1-ball design program.
///
/// The optimal value equals `radius * min over the span of |h + l|_inf`,
/// reported through `dual_value`.
pub fn solve_l1(program: &L1BallProgram) -> Result<LpSolution, LpError> {
    let sf = program.standard_form();
    let out = solve_standard(&sf)?;
    let argmax = program.extract(&out.x);
    program.check_feasible(&argmax)?;
    let dual_value: f64 = out.duals.iter().zip(&sf.b).map(|(y, b)| y * b).sum();
    LpSolution {
        argmax,
        objective_value: out.value,
        dual_value,
    }
    .certify()
}

/// Solve the l-infinity-ball design program.
///
/// The optimal value equals the l1 distance from the objective vector to
/// the orthogonality space, reported through `dual_value`.
pub fn solve_linf(program: &LInfBallProgram) -> Result<LpSolution, LpError> {
    let (sf, shift) = program.standard_form();
    let out = solve_standard(&sf)?;
    let argmax = program.extract(&out.x);
    program.check_feasible(&argmax)?;
    let dual_raw: f64 = out.duals.iter().zip(&sf.b).map(|(y, b)| y * b).sum();
    LpSolution {
        argmax,
        objective_value: out.value - shift,
        dual_value: dual_raw - shift,
    }
    .certify()
}

/// `min over l in span(rows) of |h + l|_inf`, solved as its own LP.
pub fn min_linf_distance(h: &[f64], span_rows: &[Vec<f64>]) -> Result<f64, LpError> {
    let sf = linf_distance_form(h, span_rows)?;
    let out = solve_standard(&sf)?;
    Ok(-out.value)
}

/// `min over v in span(basis) of |h + v|_1`, solved as its own LP.
pub fn min_l1_distance(h: &[f64], basis: &[Vec<f64>]) -> Result<f64, LpError> {
    let sf = l1_distance_form(h, basis)?;
    let out = solve_standard(&sf)?;
    Ok(-out.value)
}

/// Brute-force counterpart of [`min_linf_distance`] for test oracles.
pub fn brute_min_linf_distance(h: &[f64], span_rows: &[Vec<f64>]) -> Result<f64, LpError> {
    let sf = linf_distance_form(h, span_rows)?;
    Ok(-brute_force_standard(&sf)?)
}

/// Brute-force counterpart of [`min_l1_distance`] for test oracles.
pub fn brute_min_l1_distance(h: &[f64], basis: &[Vec<f64>]) -> Result<f64, LpError> {
    let sf = l1_distance_form(h, basis)?;
    Ok(-brute_force_standard(&sf)?)
}

/// Standard form of the l-infinity distance LP:
/// minimize t subject to -t <= h + sum_k c_k row_k <= t.
fn linf_distance_form(h: &[f64], span_rows: &[Vec<f64>]) -> Result<StandardForm, LpError> {
    let d = h.len();
    for row in span_rows {
        if row.len() != d {
            return Err(LpError::DimensionMismatch {
                expected: d,
                actual: row.len(),
            });
        }
    }
    let rows = orthonormal_real(span_rows);
    let r = rows.len();
    // variables: c+ (r), c- (r), t (1), upper slack (d), lower slack (d)
    let n = 2 * r + 1 + 2 * d;
    let mut a = Vec::with_capacity(2 * d);
    let mut b = Vec::with_capacity(2 * d);
    for i in 0..d {
        let mut up = vec![0.0; n];
        let mut lo = vec![0.0; n];
        for k in 0..r {
            up[k] = rows[k][i];
            up[r + k] = -rows[k][i];
            lo[k] = -rows[k][i];
            lo[r + k] = rows[k][i];
        }
        up[2 * r] = -1.0;
        lo[2 * r] = -1.0;
        up[2 * r + 1 + i] = 1.0;
        lo[2 * r + 1 + d + i] = 1.0;
        a.push(up);
        b.push(-h[i]);
        a.push(lo);
        b.push(h[i]);
    }
    let mut c = vec![0.0; n];
    c[2 * r] = -1.0;
    Ok(StandardForm { a, b, c })
}

/// Standard form of the l1 distance LP:
/// minimize sum_i t_i subject to -t_i <= (h + V c)_i <= t_i.
fn l1_distance_form(h: &[f64], basis: &[Vec<f64>]) -> Result<StandardForm, LpError> {
    let d = h.len();
    for row in basis {
        if row.len() != d {
            return Err(LpError::DimensionMismatch {
                expected: d,
                actual: row.len(),
            });
        }
    }
    let rows = orthonormal_real(basis);
    let r = rows.len();
    // variables: c+ (r), c- (r), t (d), upper slack (d), lower slack (d)
    let n = 2 * r + 3 * d;
    let mut a = Vec::with_capacity(2 * d);
    let mut b = Vec::with_capacity(2 * d);
    for i in 0..d {
        let mut up = vec![0.0; n];
        let mut lo = vec![0.0; n];
        for k in 0..r {
            up[k] = rows[k][i];
            up[r + k] = -rows[k][i];
            lo[k] = -rows[k][i];
            lo[r + k] = rows[k][i];
        }
        up[2 * r + i] = -1.0;
        lo[2 * r + i] = -1.0;
        up[2 * r + d + i] = 1.0;
        lo[2 * r + 2 * d + i] = 1.0;
        a.push(up);
        b.push(-h[i]);
        a.push(lo);
        b.push(h[i]);
    }
    let mut c = vec![0.0; n];
    for i in 0..d {
        c[2 * r + i] = -1.0;
    }
    Ok(StandardForm { a, b, c })
}

/// Orthonormalize real rows, dropping dependent ones.
fn orthonormal_real(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let original: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if original == 0.0 {
            continue;
        }
        let mut w = row.clone();
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= dot * qi;
                }
            }
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 * original {
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            basis.push(w);
        }
    }
    basis
}

fn residual_norm(v: &[f64], ortho_rows: &[Vec<f64>]) -> f64 {
    let mut w = v.to_vec();
    for q in ortho_rows {
        let dot: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
        for (wi, qi) in w.iter_mut().zip(q) {
            *wi -= dot * qi;
        }
    }
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}
