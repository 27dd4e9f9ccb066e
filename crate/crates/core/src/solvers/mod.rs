//! The iterative methods: RKAS (with a stored or on-the-fly Gram matrix),
//! relaxed RK and REK, plus their convergence bounds.

mod analysis;
mod bounds;
mod config;
mod gram;
mod run;
mod solver;

pub use analysis::{expected_rkas_residual_error, rkas_update};
pub use bounds::{
    predict_iters_rk, predict_iters_rkas, rk_error_bound, rk_horizon, rkas_contraction_factor,
    rkas_error_bound, rkas_residual_bound, RkPrediction,
};
pub use config::{Method, SolverConfig, DEFAULT_RSE_TOL};
pub use gram::StoredGram;
pub use run::{run, run_counted, ConvergenceRecord, RunReport, Status};
pub use solver::{Solver, SolverState};
