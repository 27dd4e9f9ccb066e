use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::solver::{Solver, SolverState};
use crate::error::{Error, Result};
use crate::flops::{NoCount, OpCounter};
use crate::linalg::dist_sq;
use crate::oracle::GroundTruth;
use crate::problems::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    #[serde(rename = "maxiters")]
    MaxIters,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIters => "maxiters",
        })
    }
}

/// One checkpoint of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub iter: u64,
    pub rse: f64,
    /// `‖A x^k − A A†b‖²` when available.
    pub residual_err_sq: Option<f64>,
    /// Seconds since the run started, setup included.
    pub elapsed: f64,
    pub flops: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub status: Status,
    pub iterations: u64,
    pub final_rse: f64,
    pub records: Vec<ConvergenceRecord>,
    pub state: SolverState,
    pub elapsed_seconds: f64,
    /// RKAS only: `‖r − (Ax − b)‖₂` at termination.
    pub final_drift: Option<f64>,
}

/// Run `cfg.method` from `x⁰ = 0` until `RSE ≤ cfg.rse_tol` or
/// `cfg.max_iters` iterations.
pub fn run(sys: &LinearSystem, gt: &GroundTruth, cfg: &SolverConfig) -> Result<RunReport> {
    run_counted(sys, gt, cfg, NoCount).map(|(report, _)| report)
}

/// [`run`] with an operation counter threaded through setup and iterations.
pub fn run_counted<C: OpCounter>(
    sys: &LinearSystem,
    gt: &GroundTruth,
    cfg: &SolverConfig,
    ops: C,
) -> Result<(RunReport, C)> {
    let start = Instant::now();
    let solver = Solver::with_counter(sys, cfg.clone(), ops)?;
    solver.run_from(gt, start)
}

impl<'a, C: OpCounter> Solver<'a, C> {
    /// Iterate from the current state until the stopping rule fires.
    pub fn run(self, gt: &GroundTruth) -> Result<(RunReport, C)> {
        self.run_from(gt, Instant::now())
    }

    fn run_from(mut self, gt: &GroundTruth, start: Instant) -> Result<(RunReport, C)> {
        let sys = self.system();
        if gt.nrows() != sys.nrows() || gt.ncols() != sys.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "ground truth is {}x{}, system is {}x{}",
                gt.nrows(),
                gt.ncols(),
                sys.nrows(),
                sys.ncols()
            )));
        }
        let cfg = self.config().clone();
        let mut records = Vec::new();
        let mut rse = gt.rse(&self.state().x)?;
        records.push(self.record(gt, rse, &start));
        let status = loop {
            if rse <= cfg.rse_tol {
                break Status::Converged;
            }
            if self.state().k >= cfg.max_iters {
                break Status::MaxIters;
            }
            self.step();
            let k = self.state().k;
            if let Some(every) = cfg.residual_refresh_every {
                if k % every == 0 {
                    self.refresh_residual();
                }
            }
            if k % cfg.check_every == 0 || k == cfg.max_iters {
                rse = gt.rse(&self.state().x)?;
                records.push(self.record(gt, rse, &start));
            }
        };
        let final_drift = self.residual_drift();
        let elapsed_seconds = start.elapsed().as_secs_f64();
        let (state, ops) = self.into_parts();
        Ok((
            RunReport {
                status,
                iterations: state.k,
                final_rse: rse,
                records,
                state,
                elapsed_seconds,
                final_drift,
            },
            ops,
        ))
    }

    fn record(&self, gt: &GroundTruth, rse: f64, start: &Instant) -> ConvergenceRecord {
        let state = self.state();
        // r − e = (Ax − b) − (A A†b − b)
        let residual_err_sq = match &state.r {
            Some(r) => Some(dist_sq(r, &gt.e)),
            None if self.config().track_residual => {
                let ax = self.system().csr().matvec(&state.x).expect("dimensions checked");
                Some(gt.residual_err_sq_from_product(&ax))
            }
            None => None,
        };
        ConvergenceRecord {
            iter: state.k,
            rse,
            residual_err_sq,
            elapsed: start.elapsed().as_secs_f64(),
            flops: self.counter().total(),
        }
    }
}
