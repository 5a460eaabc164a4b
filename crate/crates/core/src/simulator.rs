//! Dense density-matrix integration with periodic recovery.
//!
//! Fixed-step classical RK4 between recoveries keeps the integrator simple
//! and its convergence order checkable; the recovery channel is applied as
//! a Kraus map every interval, renormalizing away the measured weight that
//! leaks outside the reachable subspace (second order in the interval for
//! a correcting code).

use num_complex::Complex64;
use thiserror::Error;

use crate::dephasing::RecoveryChannel;
use crate::linalg::{eigh, inner, vec_norm, DenseMatrix, LinalgError};
use crate::model::{CodePair, LindbladModel};

#[derive(Debug, Clone, Error)]
pub enum SimulatorError {
    #[error("state is not a density matrix: {0}")]
    InvalidState(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("integration step too large: {0}")]
    StepTooLarge(String),
    #[error("codespace population {population:.4} below the fit threshold")]
    LeakageTooLarge { population: f64 },
    #[error("trajectory too short to fit: {0}")]
    FitUnderdetermined(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Trace drift beyond this aborts instead of renormalizing.
const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Eigenvalues below this are a positivity failure.
const POSITIVITY_TOL: f64 = -1e-8;

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: DenseMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: DenseMatrix) -> Result<Self, SimulatorError> {
        if !matrix.is_square() {
            return Err(SimulatorError::InvalidState("not square".into()));
        }
        let herm_dev = matrix.hermitian_deviation();
        if herm_dev > 1e-10 * matrix.frobenius_norm().max(1.0) {
            return Err(SimulatorError::InvalidState(format!(
                "Hermiticity deviation {herm_dev:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(SimulatorError::InvalidState(format!(
                "trace {trace} differs from one"
            )));
        }
        let eig = eigh(&matrix.hermitian_part())?;
        if eig.eigenvalues[0] < POSITIVITY_TOL {
            return Err(SimulatorError::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                eig.eigenvalues[0]
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(state: &[Complex64]) -> Result<Self, SimulatorError> {
        let norm = vec_norm(state);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimulatorError::InvalidState(format!(
                "pure state norm {norm} differs from one"
            )));
        }
        Self::new(DenseMatrix::outer(state, state))
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn expectation(&self, op: &DenseMatrix) -> Complex64 {
        op.matmul(&self.matrix).trace()
    }

    /// Population inside the codespace of `code`.
    pub fn codespace_population(&self, code: &CodePair) -> f64 {
        self.expectation(&code.projector()).re
    }

    /// Logical Bloch vector `(tr rho X_L, tr rho Y_L, tr rho Z_L)`.
    pub fn logical_bloch(&self, code: &CodePair) -> [f64; 3] {
        [
            self.expectation(&code.logical_x()).re,
            self.expectation(&code.logical_y()).re,
            self.expectation(&code.logical_z()).re,
        ]
    }
}

/// Timing of one run: total time, recovery interval, integrator step, and
/// the estimand value driving the Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionSchedule {
    pub total_time: f64,
    pub recovery_interval: f64,
    pub step: f64,
    pub omega: f64,
}

impl EvolutionSchedule {
    pub fn new(
        total_time: f64,
        recovery_interval: f64,
        step: f64,
        omega: f64,
    ) -> Result<Self, SimulatorError> {
        if !(total_time > 0.0) || !(recovery_interval > 0.0) || !(step > 0.0) {
            return Err(SimulatorError::InvalidSchedule(
                "times must be positive".into(),
            ));
        }
        if step > recovery_interval / 20.0 + 1e-15 {
            return Err(SimulatorError::InvalidSchedule(format!(
                "step {step} exceeds interval/20 = {}",
                recovery_interval / 20.0
            )));
        }
        let intervals = (total_time / recovery_interval).round();
        if intervals < 1.0 || (intervals * recovery_interval - total_time).abs() > 1e-9 * total_time
        {
            return Err(SimulatorError::InvalidSchedule(format!(
                "recovery interval {recovery_interval} does not divide total time {total_time}"
            )));
        }
        Ok(Self {
            total_time,
            recovery_interval,
            step,
            omega,
        })
    }

    /// Default integrator step, interval/50.
    pub fn with_default_step(
        total_time: f64,
        recovery_interval: f64,
        omega: f64,
    ) -> Result<Self, SimulatorError> {
        Self::new(total_time, recovery_interval, recovery_interval / 50.0, omega)
    }

    pub fn intervals(&self) -> usize {
        (self.total_time / self.recovery_interval).round() as usize
    }

    pub fn steps_per_interval(&self) -> usize {
        (self.recovery_interval / self.step).round().max(1.0) as usize
    }
}

/// One sampled point of a run: the state right after the recovery at
/// `time`, the codespace population just before it, and the weight the
/// recovery measurement discarded.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub state: DensityMatrix,
    pub pre_recovery_population: Option<f64>,
    pub discarded_weight: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub omega: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        &self.points.last().expect("trajectory is never empty").state
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.time).collect()
    }

    pub fn max_discarded_weight(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.discarded_weight)
            .fold(0.0, f64::max)
    }
}

/// Lindblad right-hand side `-i omega [H, rho] + sum_i r_i D[L_i](rho)`.
fn lindblad_rhs(
    model: &LindbladModel,
    omega: f64,
    jump_products: &[DenseMatrix],
    rho: &DenseMatrix,
) -> DenseMatrix {
    let h = model.hamiltonian();
    let mut out = h
        .matmul(rho)
        .sub(&rho.matmul(h))
        .scale(Complex64::new(0.0, -omega));
    for ((jump, product), &rate) in model
        .jumps()
        .iter()
        .zip(jump_products)
        .zip(model.rates())
    {
        if rate == 0.0 {
            continue;
        }
        let sandwich = jump.matmul(rho).matmul(&jump.adjoint());
        let anti = product
            .matmul(rho)
            .add(&rho.matmul(product))
            .scale(Complex64::new(0.5, 0.0));
        out = out.add(&sandwich.sub(&anti).scale(Complex64::new(rate, 0.0)));
    }
    out
}

fn rk4_step(
    model: &LindbladModel,
    omega: f64,
    jump_products: &[DenseMatrix],
    rho: &DenseMatrix,
    h: f64,
) -> DenseMatrix {
    let k1 = lindblad_rhs(model, omega, jump_products, rho);
    let r2 = rho.add(&k1.scale(Complex64::new(0.5 * h, 0.0)));
    let k2 = lindblad_rhs(model, omega, jump_products, &r2);
    let r3 = rho.add(&k2.scale(Complex64::new(0.5 * h, 0.0)));
    let k3 = lindblad_rhs(model, omega, jump_products, &r3);
    let r4 = rho.add(&k3.scale(Complex64::new(h, 0.0)));
    let k4 = lindblad_rhs(model, omega, jump_products, &r4);
    let mut increment = k1;
    increment = increment.add(&k2.scale(Complex64::new(2.0, 0.0)));
    increment = increment.add(&k3.scale(Complex64::new(2.0, 0.0)));
    increment = increment.add(&k4);
    rho.add(&increment.scale(Complex64::new(h / 6.0, 0.0)))
}

/// Evolve under the model with recoveries every interval, sampling the
/// state at every recovery boundary.
pub fn evolve_trajectory(
    model: &LindbladModel,
    initial: &DensityMatrix,
    schedule: &EvolutionSchedule,
    recovery: Option<&RecoveryChannel>,
) -> Result<Trajectory, SimulatorError> {
    if initial.dimension() != model.dimension() {
        return Err(SimulatorError::InvalidState(format!(
            "state dimension {} does not match model dimension {}",
            initial.dimension(),
            model.dimension()
        )));
    }
    let jump_products: Vec<DenseMatrix> = model
        .jumps()
        .iter()
        .map(|l| l.adjoint().matmul(l))
        .collect();

    let mut rho = initial.matrix().clone();
    let mut points = vec![TrajectoryPoint {
        time: 0.0,
        state: initial.clone(),
        pre_recovery_population: None,
        discarded_weight: 0.0,
    }];

    let steps = schedule.steps_per_interval();
    let h = schedule.recovery_interval / steps as f64;
    for interval in 1..=schedule.intervals() {
        let trace_before = rho.trace().re;
        for _ in 0..steps {
            rho = rk4_step(model, schedule.omega, &jump_products, &rho, h);
        }
        let trace_after = rho.trace().re;
        let drift = (trace_after - trace_before).abs();
        if drift > TRACE_DRIFT_TOL {
            return Err(SimulatorError::StepTooLarge(format!(
                "integration trace drift {drift:.3e} over one interval"
            )));
        }

        let mut discarded = 0.0;
        let mut pre_population = None;
        if let Some(channel) = recovery {
            pre_population = Some(
                channel
                    .codespace_projector()
                    .matmul(&rho)
                    .trace()
                    .re,
            );
            let recovered = channel.apply(&rho);
            let kept = recovered.trace().re;
            discarded = trace_after - kept;
            if kept <= 0.0 {
                return Err(SimulatorError::StepTooLarge(
                    "recovery discarded the entire state".into(),
                ));
            }
            rho = recovered.scale(Complex64::new(1.0 / kept, 0.0));
        } else {
            // renormalize integration roundoff only
            rho = rho.scale(Complex64::new(1.0 / trace_after, 0.0));
        }
        rho = rho.hermitian_part();

        points.push(TrajectoryPoint {
            time: interval as f64 * schedule.recovery_interval,
            state: DensityMatrix::new(rho.clone())?,
            pre_recovery_population: pre_population,
            discarded_weight: discarded,
        });
    }
    Ok(Trajectory {
        points,
        omega: schedule.omega,
    })
}

/// Final state of [`evolve_trajectory`].
pub fn evolve(
    model: &LindbladModel,
    initial: &DensityMatrix,
    schedule: &EvolutionSchedule,
    recovery: Option<&RecoveryChannel>,
) -> Result<DensityMatrix, SimulatorError> {
    Ok(evolve_trajectory(model, initial, schedule, recovery)?
        .final_state()
        .clone())
}

/// Pure-state quantum Fisher information `4 t^2 (<H^2> - <H>^2)`.
pub fn pure_qfi(hamiltonian: &DenseMatrix, state: &[Complex64], time: f64) -> f64 {
    let hs = hamiltonian.matvec(state);
    let mean = inner(state, &hs).re;
    let second = inner(&hs, &hs).re;
    4.0 * time * time * (second - mean * mean).max(0.0)
}

/// Fitted effective-qubit parameters from a simulated trajectory.
#[derive(Debug, Clone, Copy)]
pub struct LogicalFit {
    /// Phase-accumulation gain: slope of the logical phase over `omega t`.
    pub phase_gain: f64,
    /// Dephasing multiplier: minus the slope of the log coherence in units
    /// of the dephasing time.
    pub dephasing_multiplier: f64,
    pub phase_residual: f64,
    pub coherence_residual: f64,
}

/// Fit the dephasing-qubit parameters from logical Bloch vectors.
///
/// Requires every sampled state to keep at least 0.99 codespace population.
/// The phase is unwrapped between consecutive samples, so the sampling must
/// resolve the logical precession.
pub fn logical_qubit_fit(
    states: &[DensityMatrix],
    times: &[f64],
    omega: f64,
    t2: f64,
    code: &CodePair,
) -> Result<LogicalFit, SimulatorError> {
    if states.len() != times.len() {
        return Err(SimulatorError::FitUnderdetermined(format!(
            "{} states vs {} times",
            states.len(),
            times.len()
        )));
    }
    if states.len() < 3 {
        return Err(SimulatorError::FitUnderdetermined(
            "need at least 3 samples".into(),
        ));
    }
    if omega == 0.0 {
        return Err(SimulatorError::FitUnderdetermined(
            "phase slope is degenerate at omega = 0".into(),
        ));
    }

    let mut phases = Vec::with_capacity(states.len());
    let mut log_coherences = Vec::with_capacity(states.len());
    for state in states {
        let population = state.codespace_population(code);
        if population < 0.99 {
            return Err(SimulatorError::LeakageTooLarge { population });
        }
        let bloch = state.logical_bloch(code);
        let coherence = (bloch[0] * bloch[0] + bloch[1] * bloch[1]).sqrt();
        if coherence <= 1e-12 {
            return Err(SimulatorError::FitUnderdetermined(
                "logical coherence vanished".into(),
            ));
        }
        phases.push(bloch[1].atan2(bloch[0]));
        log_coherences.push(coherence.ln());
    }
    // unwrap phases relative to the previous sample
    for i in 1..phases.len() {
        let mut delta = phases[i] - phases[i - 1];
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        phases[i] = phases[i - 1] + delta;
    }

    let (phase_slope, phase_residual) = linear_fit(times, &phases);
    let (coherence_slope, coherence_residual) = linear_fit(times, &log_coherences);
    Ok(LogicalFit {
        phase_gain: (phase_slope / omega).abs(),
        dephasing_multiplier: -coherence_slope * t2,
        phase_residual,
        coherence_residual,
    })
}

/// Least-squares slope and rms residual of `y` against `x`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean_x: f64 = x.iter().sum::<f64>() / n;
    let mean_y: f64 = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mean_x) * (xi - mean_x);
        sxy += (xi - mean_x) * (yi - mean_y);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = mean_y - slope * mean_x;
    let mut ss = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let r = yi - slope * xi - intercept;
        ss += r * r;
    }
    (slope, (ss / n).sqrt())
}

/// QFI of a qubit state from its Bloch vector and the derivative of the
/// Bloch vector with respect to the estimand.
///
/// `F = |dr|^2 + (r . dr)^2 / (1 - |r|^2)`, dropping the second term in
/// the pure limit.
pub fn mixed_qubit_qfi(bloch: [f64; 3], dbloch: [f64; 3]) -> f64 {
    let r2: f64 = bloch.iter().map(|x| x * x).sum();
    let d2: f64 = dbloch.iter().map(|x| x * x).sum();
    let rd: f64 = bloch.iter().zip(&dbloch).map(|(a, b)| a * b).sum();
    if 1.0 - r2 <= 1e-10 {
        d2
    } else {
        d2 + rd * rd / (1.0 - r2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::{
        build_recovery, decompose_modes, design_exact, lindblad_model, ring_model,
    };
    use crate::linalg::real_vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_qubit_dephasing(t2: f64) -> LindbladModel {
        let h = DenseMatrix::real_diagonal(&[0.5, -0.5]);
        let z = DenseMatrix::real_diagonal(&[1.0, -1.0]);
        LindbladModel::new(h, vec![z], vec![1.0 / (2.0 * t2)]).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let amp = 1.0 / 2.0f64.sqrt();
        DensityMatrix::from_pure(&real_vec(&[amp, amp])).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(EvolutionSchedule::new(1.0, 0.1, 0.004, 0.0).is_ok());
        // step above interval/20
        assert!(EvolutionSchedule::new(1.0, 0.1, 0.01, 0.0).is_err());
        // interval does not divide total time
        assert!(EvolutionSchedule::new(1.0, 0.3, 0.001, 0.0).is_err());
        assert!(EvolutionSchedule::new(-1.0, 0.1, 0.001, 0.0).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let ok = DenseMatrix::real_diagonal(&[0.5, 0.5]);
        assert!(DensityMatrix::new(ok).is_ok());
        let bad_trace = DenseMatrix::real_diagonal(&[0.9, 0.3]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = DenseMatrix::real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
    }

    #[test]
    fn noiseless_rotation_accumulates_phase() {
        let h = DenseMatrix::real_diagonal(&[0.5, -0.5]);
        let model = LindbladModel::with_unit_rates(h, vec![]).unwrap();
        let omega = 0.7;
        let schedule = EvolutionSchedule::with_default_step(1.0, 0.05, omega).unwrap();
        let final_state = evolve(&model, &plus_state(), &schedule, None).unwrap();
        // coherence phase should be exactly omega * t
        let coherence = final_state.matrix()[(0, 1)];
        let expected = 0.5 * (c(0.0, -1.0) * c(omega, 0.0)).exp();
        assert!((coherence - expected).norm() < 1e-8);
    }

    #[test]
    fn dephasing_coherence_decays_exponentially() {
        let t2 = 1.0;
        let model = single_qubit_dephasing(t2);
        let t = 0.5;
        let schedule = EvolutionSchedule::new(t, 0.05, 0.05 / 50.0, 0.0).unwrap();
        let final_state = evolve(&model, &plus_state(), &schedule, None).unwrap();
        let coherence = final_state.matrix()[(0, 1)].norm();
        assert!(
            (coherence - 0.5 * (-t / t2).exp()).abs() < 1e-6,
            "coherence {coherence}"
        );
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let t2 = 1.0;
        let model = single_qubit_dephasing(t2);
        let t = 0.2;
        let exact = 0.5 * (-t / t2).exp();
        let mut errors = Vec::new();
        for steps in [1usize, 2, 4] {
            let h = 0.01 / steps as f64 / 2.0;
            let schedule = EvolutionSchedule::new(t, t, h, 0.0).unwrap();
            let state = evolve(&model, &plus_state(), &schedule, None).unwrap();
            errors.push((state.matrix()[(0, 1)].norm() - exact).abs());
        }
        // halving h divides the error by about 16
        let r1 = errors[0] / errors[1].max(1e-300);
        let r2 = errors[1] / errors[2].max(1e-300);
        assert!(r1 > 8.0 && r1 < 32.0, "ratios {errors:?}");
        assert!(r2 > 8.0 && r2 < 32.0, "ratios {errors:?}");
    }

    #[test]
    fn pure_qfi_basics() {
        // eigenstate has zero information
        let h = DenseMatrix::real_diagonal(&[0.5, -0.5]);
        assert!(pure_qfi(&h, &real_vec(&[1.0, 0.0]), 2.0).abs() < 1e-15);
        // balanced superposition of a logical Z with gain A: F = A^2 t^2
        let a = 3.0;
        let hl = DenseMatrix::real_diagonal(&[0.5 * a, -0.5 * a]);
        let amp = 1.0 / 2.0f64.sqrt();
        let f = pure_qfi(&hl, &real_vec(&[amp, amp]), 2.0);
        assert!((f - a * a * 4.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_qfi_limits() {
        assert_eq!(mixed_qubit_qfi([0.0; 3], [0.0; 3]), 0.0);
        // maximally mixed with drift along z only
        let f = mixed_qubit_qfi([0.0; 3], [0.0, 0.0, 0.3]);
        assert!((f - 0.09).abs() < 1e-15);
        // pure state: second term dropped
        let f_pure = mixed_qubit_qfi([1.0, 0.0, 0.0], [0.0, 2.0, 0.0]);
        assert!((f_pure - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_qfi_on_dephasing_trajectories_matches_closed_form() {
        // a dephasing qubit with unit gain has F(t) = t^2 exp(-2t/T2);
        // evaluate it from finite-difference Bloch vectors
        let t2 = 1.0;
        let model = single_qubit_dephasing(t2);
        let t = 0.4;
        let delta = 1e-3 / t;
        let code = CodePair::new(real_vec(&[1.0, 0.0]), real_vec(&[0.0, 1.0])).unwrap();
        let mut blochs = Vec::new();
        for sign in [1.0, -1.0] {
            let schedule = EvolutionSchedule::new(t, 0.02, 0.0004, sign * delta).unwrap();
            let state = evolve(&model, &plus_state(), &schedule, None).unwrap();
            blochs.push(state.logical_bloch(&code));
        }
        let mid = [
            0.5 * (blochs[0][0] + blochs[1][0]),
            0.5 * (blochs[0][1] + blochs[1][1]),
            0.5 * (blochs[0][2] + blochs[1][2]),
        ];
        let derivative = [
            (blochs[0][0] - blochs[1][0]) / (2.0 * delta),
            (blochs[0][1] - blochs[1][1]) / (2.0 * delta),
            (blochs[0][2] - blochs[1][2]) / (2.0 * delta),
        ];
        let qfi = mixed_qubit_qfi(mid, derivative);
        let expected = t * t * (-2.0 * t / t2).exp();
        assert!(
            (qfi - expected).abs() <= 0.03 * expected,
            "QFI {qfi} vs closed form {expected}"
        );
    }

    #[test]
    fn pure_qfi_matches_commuting_design_formula() {
        // for a designed code probed with (|0>+|1>)/sqrt(2), the pure-state
        // QFI equals t^2 <beta, gaps>^2
        let h = DenseMatrix::real_diagonal(&[3.0, 1.0, -1.0, -3.0]);
        let l = DenseMatrix::real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        let model = crate::model::LindbladModel::with_unit_rates(h.clone(), vec![l]).unwrap();
        let diag = crate::model::diagonalize_commuting(&model).unwrap();
        let design = crate::model::design_commuting_code(&diag).unwrap();
        let t = 1.7;
        let qfi = pure_qfi(&h, &design.code.plus_state(), t);
        let expected = t * t * design.qfi_coefficient;
        assert!(
            (qfi - expected).abs() <= 1e-9 * (1.0 + expected),
            "QFI {qfi} vs {expected}"
        );
    }

    #[test]
    fn unencoded_qubit_fit_recovers_unit_parameters() {
        let t2 = 1.0;
        let model = single_qubit_dephasing(t2);
        let omega = 1.0;
        let schedule = EvolutionSchedule::new(0.5, 0.025, 0.025 / 50.0, omega).unwrap();
        let trajectory = evolve_trajectory(&model, &plus_state(), &schedule, None).unwrap();
        let code = CodePair::new(real_vec(&[1.0, 0.0]), real_vec(&[0.0, 1.0])).unwrap();
        let states: Vec<DensityMatrix> = trajectory.points.iter().map(|p| p.state.clone()).collect();
        let fit = logical_qubit_fit(&states, &trajectory.times(), omega, t2, &code).unwrap();
        assert!((fit.phase_gain - 1.0).abs() < 1e-6, "A {}", fit.phase_gain);
        assert!(
            (fit.dephasing_multiplier - 1.0).abs() < 1e-6,
            "B {}",
            fit.dephasing_multiplier
        );
    }

    #[test]
    fn encoded_sensor_keeps_codespace_population() {
        let cm = ring_model(3, &[-0.5], 1.0).unwrap();
        let (design, _) = design_exact(&cm).unwrap();
        let modes = decompose_modes(&cm).unwrap();
        let recovery = build_recovery(&design, &modes).unwrap();
        let model = lindblad_model(&cm).unwrap();
        let initial = DensityMatrix::from_pure(&design.code.plus_state()).unwrap();
        let schedule = EvolutionSchedule::new(0.1, 0.001, 0.001 / 20.0, 1.0).unwrap();
        let trajectory =
            evolve_trajectory(&model, &initial, &schedule, Some(&recovery)).unwrap();
        for point in &trajectory.points[1..] {
            // the GHZ code on this model is decoherence free
            assert!(point.pre_recovery_population.unwrap() > 1.0 - 1e-9);
            assert!(point.discarded_weight.abs() < 1e-9);
        }
        // in this unitary limit the fitted dephasing multiplier is zero at
        // the fit resolution
        let states: Vec<DensityMatrix> =
            trajectory.points.iter().map(|p| p.state.clone()).collect();
        let fit =
            logical_qubit_fit(&states, &trajectory.times(), 1.0, cm.t2(), &design.code).unwrap();
        assert!(
            fit.dephasing_multiplier.abs() <= 1e-3,
            "B {}",
            fit.dephasing_multiplier
        );
    }
}
