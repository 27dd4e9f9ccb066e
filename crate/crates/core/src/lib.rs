//! Randomized Kaczmarz with adaptive stepsizes (RKAS) for linear systems
//! that may be inconsistent, together with relaxed randomized Kaczmarz
//! (RK) and randomized extended Kaczmarz (REK) as baselines.
//!
//! RKAS samples a row `i` with probability `‖A_{i,:}‖² / ‖A‖²_F` and moves
//! along `A_{i,:}ᵀ` by the stepsize that brings `Ax` closest to the
//! projection `A A†b`. The maintained residual `r = Ax − b` makes that
//! stepsize computable without knowing `A†b`:
//!
//! ```text
//! g = A A_{i,:}ᵀ,   α = ⟨g, r⟩ / ‖g‖²,   x ← x − α A_{i,:}ᵀ,   r ← r − α g
//! ```
//!
//! Unlike RK, the iterates converge to `A†b` even when `b ∉ Range(A)`.
//!
//! ```
//! use rkas::{analyze, run, LinearSystem, SolverConfig, Status};
//! use rkas::linalg::DenseMatrix;
//!
//! let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])?;
//! let sys = LinearSystem::new(a, vec![1.0, 1.0, 1.0])?;
//! let gt = analyze(sys.a(), sys.b())?;
//! let report = run(&sys, &gt, &SolverConfig::rkas().seed(7))?;
//! assert_eq!(report.status, Status::Converged);
//! assert!(report.final_rse <= 1e-12);
//! # Ok::<(), rkas::Error>(())
//! ```

mod error;
pub mod flops;
pub mod linalg;
pub mod oracle;
pub mod problems;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
pub use oracle::{analyze, GroundTruth};
pub use problems::{LinearSystem, ProblemKind, ProblemSpec};
pub use solvers::{run, Method, RunReport, Solver, SolverConfig, Status};
