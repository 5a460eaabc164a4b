//! Ancilla-free quantum error correction codes for sensing.
//!
//! This crate designs two-dimensional QEC codes that correct Markovian noise
//! while leaving a signal Hamiltonian detectable at the logical level, and
//! validates the resulting sensitivities with a dense Lindblad simulator.
//!
//! The main entry points are:
//!
//! - [`model`]: Lindblad models, Lindblad spans, the HNLS membership check,
//!   and the commuting-noise code design driven by a linear program.
//! - [`dephasing`]: N-qubit correlated-dephasing codes (exact, approximate,
//!   and beyond-HNLS variants), the modified transpose recovery, effective
//!   logical dynamics, and sensitivity comparisons against parallel and GHZ
//!   sensing.
//! - [`bosonic`]: Chebyshev and binomial codes for a lossy bosonic mode on a
//!   truncated Fock space.
//! - [`simulator`]: density-matrix integration with periodic recovery and
//!   quantum Fisher information evaluation.
//! - [`lp`]: the exact simplex solver behind the code-design programs, with a
//!   brute-force enumeration oracle used by the test suites.
//! - [`linalg`]: the small dense complex linear algebra kernel everything
//!   else is built on.

pub mod bosonic;
pub mod dephasing;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod simulator;

pub use linalg::{DenseMatrix, EigenDecomposition, LinalgError};
pub use lp::{L1BallProgram, LInfBallProgram, LpError, LpSolution};
pub use model::{CodePair, DesignResult, LindbladModel, LindbladSpan, ModelError};
