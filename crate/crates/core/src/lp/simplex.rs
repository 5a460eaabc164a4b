//! Dense two-phase simplex on standard-form problems.
//!
//! Solves `max c.x subject to A x = b, x >= 0` exactly at vertices. Bland's
//! rule is used for both the entering and the leaving variable, so the
//! method cannot cycle and the returned vertex is deterministic.

use crate::linalg::solve::solve_real;
use crate::lp::LpError;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub(crate) struct StandardForm {
    /// Constraint rows, m x n.
    pub a: Vec<Vec<f64>>,
    /// Right-hand sides, length m (any sign; rows are flipped internally).
    pub b: Vec<f64>,
    /// Objective to maximize, length n.
    pub c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Dual multipliers, one per constraint row (in input row order).
    pub duals: Vec<f64>,
}

struct Tableau {
    /// Rows of [A | b] kept in canonical form w.r.t. the current basis.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor == 0.0 {
                continue;
            }
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            r[col] = 0.0; // keep the canonical column exact
        }
        self.basis[row] = col;
    }

    /// Run simplex iterations maximizing `obj` over the active columns.
    fn optimize(&mut self, obj: &[f64], active: usize) -> Result<(), LpError> {
        let max_iters = 2000 * (self.ncols + 1);
        for _ in 0..max_iters {
            // reduced cost z_j = obj_j - sum_i obj[basis_i] * row_i[j]
            let mut entering = None;
            for j in 0..active {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = obj[j];
                for (i, &bi) in self.basis.iter().enumerate() {
                    reduced -= obj[bi] * self.rows[i][j];
                }
                if reduced > COST_TOL {
                    entering = Some(j);
                    break; // Bland: lowest index enters
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best_row, best_ratio)) => {
                        if ratio < best_ratio - 1e-12 {
                            Some((i, ratio))
                        } else if (ratio - best_ratio).abs() <= 1e-12
                            && self.basis[i] < self.basis[best_row]
                        {
                            // Bland tie-break: lowest basis index leaves
                            Some((i, best_ratio.min(ratio)))
                        } else {
                            Some((best_row, best_ratio))
                        }
                    }
                };
            }
            let Some((row, _)) = leaving else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::IterationLimit)
    }
}

pub(crate) fn solve_standard(sf: &StandardForm) -> Result<SimplexOutcome, LpError> {
    let m = sf.a.len();
    let n = sf.c.len();
    for row in &sf.a {
        if row.len() != n {
            return Err(LpError::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
    }
    if sf.b.len() != m {
        return Err(LpError::DimensionMismatch {
            expected: m,
            actual: sf.b.len(),
        });
    }

    // Orient rows so every right-hand side is nonnegative, then append one
    // artificial variable per row for phase 1.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in sf.a.iter().enumerate() {
        let sign = if sf.b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut r: Vec<f64> = row.iter().map(|&v| sign * v).collect();
        r.resize(n + m, 0.0);
        r.push(sign * sf.b[i]);
        r[n + i] = 1.0;
        rows.push(r);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols: n + m,
    };

    // Phase 1: minimize the artificial sum == maximize its negation.
    let mut phase1_obj = vec![0.0; n + m];
    for j in n..n + m {
        phase1_obj[j] = -1.0;
    }
    tab.optimize(&phase1_obj, n + m)?;
    let infeasibility: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bi)| bi >= n)
        .map(|(i, _)| tab.rhs(i))
        .sum();
    if infeasibility > 1e-8 {
        return Err(LpError::Infeasible);
    }
    // Drive residual artificials out of the basis; a row with no usable
    // pivot is redundant and can be dropped.
    let mut drop_rows = Vec::new();
    for i in 0..tab.rows.len() {
        if tab.basis[i] < n {
            continue;
        }
        let col = (0..n).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL);
        match col {
            Some(j) => tab.pivot(i, j),
            None => drop_rows.push(i),
        }
    }
    let kept: Vec<usize> = (0..m).filter(|i| !drop_rows.contains(i)).collect();
    if !drop_rows.is_empty() {
        tab.rows = kept.iter().map(|&i| tab.rows[i].clone()).collect();
        tab.basis = kept.iter().map(|&i| tab.basis[i]).collect();
    }

    // Phase 2 over the real columns only.
    let mut phase2_obj = sf.c.clone();
    phase2_obj.resize(n + m, 0.0);
    tab.optimize(&phase2_obj, n)?;

    let mut x = vec![0.0; n];
    for (i, &bi) in tab.basis.iter().enumerate() {
        if bi < n {
            x[bi] = tab.rhs(i);
        }
    }
    let value: f64 = x.iter().zip(&sf.c).map(|(xi, ci)| xi * ci).sum();

    let duals = recover_duals(sf, &tab.basis, &kept)?;
    Ok(SimplexOutcome { x, value, duals })
}

/// Solve `y^T B = c_B` on the original constraint matrix to obtain dual
/// multipliers; redundant (dropped) rows get multiplier zero.
fn recover_duals(
    sf: &StandardForm,
    basis: &[usize],
    kept_rows: &[usize],
) -> Result<Vec<f64>, LpError> {
    let m = sf.a.len();
    let k = kept_rows.len();
    if k == 0 {
        return Ok(vec![0.0; m]);
    }
    // B^T y = c_B restricted to the kept rows; after the drive-out step the
    // basis holds real columns only
    let mut bt = vec![vec![0.0; k]; k];
    let mut cb = vec![0.0; k];
    for (col_idx, &var) in basis.iter().enumerate() {
        debug_assert!(var < sf.c.len(), "artificial left in final basis");
        for (row_idx, &orig_row) in kept_rows.iter().enumerate() {
            bt[col_idx][row_idx] = sf.a[orig_row][var];
        }
        cb[col_idx] = sf.c[var];
    }
    let y = solve_real(&bt, &cb).map_err(|_| LpError::DegenerateDuals)?;
    let mut duals = vec![0.0; m];
    for (row_idx, &orig_row) in kept_rows.iter().enumerate() {
        duals[orig_row] = y[row_idx];
    }
    Ok(duals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_lp_by_hand() {
        // max x0 + 2 x1 s.t. x0 + x1 + x2 = 4, x1 + x3 = 3, x >= 0
        // optimum at x1 = 3, x0 = 1 -> value 7
        let sf = StandardForm {
            a: vec![vec![1.0, 1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]],
            b: vec![4.0, 3.0],
            c: vec![1.0, 2.0, 0.0, 0.0],
        };
        let out = solve_standard(&sf).unwrap();
        assert!((out.value - 7.0).abs() < 1e-9);
        assert!((out.x[0] - 1.0).abs() < 1e-9);
        assert!((out.x[1] - 3.0).abs() < 1e-9);
        // dual: y = (1, 1) since both constraints bind with c = (1,2)
        let dual_value: f64 = out.duals.iter().zip(&sf.b).map(|(y, b)| y * b).sum();
        assert!((dual_value - out.value).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_is_handled() {
        // max -x0 s.t. -x0 + x1 = -2  => x0 = 2 + x1, optimum x1 = 0, value -2
        let sf = StandardForm {
            a: vec![vec![-1.0, 1.0]],
            b: vec![-2.0],
            c: vec![-1.0, 0.0],
        };
        let out = solve_standard(&sf).unwrap();
        assert!((out.value + 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x0 = -1 with x0 >= 0 is infeasible
        let sf = StandardForm {
            a: vec![vec![1.0]],
            b: vec![-1.0],
            c: vec![0.0],
        };
        assert!(matches!(solve_standard(&sf), Err(LpError::Infeasible)));
    }

    #[test]
    fn unbounded_detected() {
        // max x0 with only x0 - x1 = 0: ray x0 = x1 -> unbounded
        let sf = StandardForm {
            a: vec![vec![1.0, -1.0]],
            b: vec![0.0],
            c: vec![1.0, 0.0],
        };
        assert!(matches!(solve_standard(&sf), Err(LpError::Unbounded)));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let sf = StandardForm {
            a: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            b: vec![1.0, 2.0],
            c: vec![1.0, 0.0],
        };
        let out = solve_standard(&sf).unwrap();
        assert!((out.value - 1.0).abs() < 1e-9);
    }
}
