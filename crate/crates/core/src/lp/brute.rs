//! Brute-force LP oracle by basic-solution enumeration.
//!
//! Converts a program to the same standard form the simplex solver uses,
//! then enumerates every basis subset of the columns, solves the square
//! system, and keeps the best feasible objective. Exponential, but exact,
//! and entirely independent of the pivoting path.

use crate::linalg::solve::solve_real;
use crate::lp::simplex::StandardForm;
use crate::lp::{L1BallProgram, LInfBallProgram, LpError};

const FEAS_TOL: f64 = 1e-9;

/// A reference to either design program, for oracle dispatch.
#[derive(Debug, Clone, Copy)]
pub enum LpProgram<'a> {
    L1(&'a L1BallProgram),
    LInf(&'a LInfBallProgram),
}

/// Exact optimum of a small design program by enumerating all basic
/// feasible solutions.
///
/// Limits: dimension <= 10 and constraint count <= 10, otherwise
/// [`LpError::TooLarge`].
pub fn brute_force_lp(program: LpProgram<'_>) -> Result<f64, LpError> {
    match program {
        LpProgram::L1(p) => {
            check_limits(p.dimension(), p.equality_rows().len())?;
            brute_force_standard(&p.standard_form())
        }
        LpProgram::LInf(p) => {
            check_limits(p.dimension(), p.orthogonality_space().len())?;
            let (sf, shift) = p.standard_form();
            Ok(brute_force_standard(&sf)? - shift)
        }
    }
}

fn check_limits(dimension: usize, constraints: usize) -> Result<(), LpError> {
    if dimension > 10 || constraints > 10 {
        return Err(LpError::TooLarge(format!(
            "dimension {dimension}, constraints {constraints}"
        )));
    }
    Ok(())
}

/// Enumerate all basic solutions of `max c.x, A x = b, x >= 0`.
pub(crate) fn brute_force_standard(sf: &StandardForm) -> Result<f64, LpError> {
    let m = sf.a.len();
    let n = sf.c.len();
    if m == 0 || m > n {
        return Err(LpError::TooLarge(format!("{m} rows, {n} cols")));
    }

    let mut best: Option<f64> = None;
    let mut columns: Vec<usize> = (0..m).collect();

    loop {
        if let Some(value) = evaluate_basis(sf, &columns) {
            best = Some(match best {
                Some(b) => b.max(value),
                None => value,
            });
        }
        if !next_combination(&mut columns, n) {
            break;
        }
    }

    best.ok_or(LpError::Infeasible)
}

/// Solve for the basic variables of one column subset; `None` when the
/// basis matrix is singular or the solution is infeasible.
fn evaluate_basis(sf: &StandardForm, columns: &[usize]) -> Option<f64> {
    let m = sf.a.len();
    let mut basis_matrix = vec![vec![0.0; m]; m];
    for (j, &col) in columns.iter().enumerate() {
        for i in 0..m {
            basis_matrix[i][j] = sf.a[i][col];
        }
    }
    let x = solve_real(&basis_matrix, &sf.b).ok()?;
    if x.iter().any(|&v| v < -FEAS_TOL || !v.is_finite()) {
        return None;
    }
    Some(
        columns
            .iter()
            .zip(&x)
            .map(|(&col, &v)| sf.c[col] * v)
            .sum(),
    )
}

/// Advance `indices` to the next k-combination of 0..n; false when done.
fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let k = indices.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if indices[i] < n - (k - i) {
            indices[i] += 1;
            for j in (i + 1)..k {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_l1, solve_linf};
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_hand_instance() {
        let p = L1BallProgram::new(vec![1.0, -1.0], vec![vec![1.0, 1.0]], 2.0).unwrap();
        let value = brute_force_lp(LpProgram::L1(&p)).unwrap();
        assert!((value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zero_is_reported_when_only_zero_is_feasible() {
        // orthogonality to the full space pins the only feasible point at 0
        let p = LInfBallProgram::new(
            vec![1.0, -2.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let value = brute_force_lp(LpProgram::LInf(&p)).unwrap();
        assert!(value.abs() < 1e-10);
    }

    #[test]
    fn linf_centering_instance() {
        let col_basis = vec![
            vec![2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0],
            vec![-1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0],
        ];
        let p = LInfBallProgram::new(vec![1.0, 1.0, 1.0], col_basis).unwrap();
        let value = brute_force_lp(LpProgram::LInf(&p)).unwrap();
        assert!((value - 3.0).abs() < 1e-10);
    }

    #[test]
    fn limits_are_enforced() {
        let p = L1BallProgram::new(vec![1.0; 11], vec![vec![1.0; 11]], 2.0).unwrap();
        assert!(matches!(
            brute_force_lp(LpProgram::L1(&p)),
            Err(LpError::TooLarge(_))
        ));
    }

    #[test]
    fn agrees_with_simplex_on_random_l1_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let d = rng.gen_range(2..7);
            let h: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut rows = vec![vec![1.0; d]];
            for _ in 0..rng.gen_range(0..3) {
                rows.push((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect());
            }
            let p = L1BallProgram::new(h, rows, 2.0).unwrap();
            let fast = solve_l1(&p).unwrap().objective_value;
            let slow = brute_force_lp(LpProgram::L1(&p)).unwrap();
            assert!(
                (fast - slow).abs() < 1e-9,
                "simplex {fast} vs enumeration {slow}"
            );
        }
    }

    #[test]
    fn agrees_with_simplex_on_random_linf_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..40 {
            let d = rng.gen_range(2..6);
            let h: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let r = rng.gen_range(0..d);
            let basis: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let p = LInfBallProgram::new(h, basis).unwrap();
            let fast = solve_linf(&p).unwrap().objective_value;
            let slow = brute_force_lp(LpProgram::LInf(&p)).unwrap();
            assert!(
                (fast - slow).abs() < 1e-9,
                "simplex {fast} vs enumeration {slow}"
            );
        }
    }
}
