//! Seeded multi-trial comparisons.
//!
//! Trials run sequentially in one process and interleave methods
//! (A, B, A, B, ...) so that drift in machine state affects every method
//! alike. Times come from the monotonic clock and include setup.

use std::time::{Duration, Instant};

use rkas::flops::FlopLedger;
use rkas::solvers::{run, run_counted, Status};
use rkas::Result;
use serde::{Deserialize, Serialize};

use crate::plan::{method_label, ExperimentPlan, Instance};

/// One run of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub method: String,
    pub trial: u64,
    pub seed: u64,
    pub stream: u64,
    pub status: Option<Status>,
    pub iterations: u64,
    pub cpu_seconds: f64,
    pub final_rse: f64,
    pub flops: Option<u64>,
    /// Set when the run failed instead of finishing.
    pub error: Option<String>,
}

/// Per-method means over a plan's trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub trials: u64,
    pub mean_iters: f64,
    pub mean_cpu_seconds: f64,
    pub mean_flops: Option<f64>,
    /// Fraction of trials that reached the tolerance.
    pub success_rate: f64,
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    /// `σ_max / σ_min` over nonzero singular values.
    pub cond: f64,
    /// `σ_max / σ_smallest` over all `min(m, n)` singular values.
    pub cond_full: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchResult {
    pub trials: Vec<TrialRow>,
    pub summary: Vec<SummaryRow>,
    pub timer_resolution_seconds: f64,
}

/// Smallest observable step of the monotonic clock.
pub fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..64 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min(t1 - t0);
    }
    best
}

pub fn run_bench(inst: &Instance, plan: &ExperimentPlan) -> Result<BenchResult> {
    plan.validate()?;
    let mut rows = Vec::new();
    for trial in 0..plan.trials {
        for k in 0..plan.methods.len() {
            let cfg = plan.trial_config(k, trial);
            let mut row = TrialRow {
                method: method_label(&cfg),
                trial,
                seed: cfg.seed,
                stream: cfg.stream,
                status: None,
                iterations: 0,
                cpu_seconds: 0.0,
                final_rse: f64::NAN,
                flops: None,
                error: None,
            };
            match run(&inst.sys, &inst.gt, &cfg) {
                Ok(report) => {
                    row.status = Some(report.status);
                    row.iterations = report.iterations;
                    row.cpu_seconds = report.elapsed_seconds;
                    row.final_rse = report.final_rse;
                    if plan.record_flops {
                        // A separate counted replay keeps the counting cost out
                        // of the timings; same seed, same iterates.
                        match run_counted(&inst.sys, &inst.gt, &cfg, FlopLedger::new()) {
                            Ok((_, ledger)) => row.flops = Some(ledger.init + ledger.iter),
                            Err(e) => row.error = Some(e.to_string()),
                        }
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            rows.push(row);
        }
    }
    let summary = summarize(inst, plan, &rows);
    Ok(BenchResult {
        trials: rows,
        summary,
        timer_resolution_seconds: timer_resolution().as_secs_f64(),
    })
}

/// Means per method, in plan order. Failed trials count against the
/// success rate and are left out of the means.
pub fn summarize(inst: &Instance, plan: &ExperimentPlan, rows: &[TrialRow]) -> Vec<SummaryRow> {
    let mut labels: Vec<String> = Vec::new();
    for cfg in &plan.methods {
        let l = method_label(cfg);
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    labels
        .into_iter()
        .map(|method| {
            let mine: Vec<&TrialRow> = rows.iter().filter(|r| r.method == method).collect();
            let done: Vec<&TrialRow> = mine.iter().copied().filter(|r| r.error.is_none()).collect();
            let mean = |f: &dyn Fn(&TrialRow) -> f64| {
                if done.is_empty() {
                    f64::NAN
                } else {
                    done.iter().map(|r| f(r)).sum::<f64>() / done.len() as f64
                }
            };
            let mean_flops = if done.iter().all(|r| r.flops.is_some()) && !done.is_empty() {
                Some(mean(&|r| r.flops.unwrap() as f64))
            } else {
                None
            };
            let converged = mine.iter().filter(|r| r.status == Some(Status::Converged)).count();
            SummaryRow {
                method,
                trials: mine.len() as u64,
                mean_iters: mean(&|r| r.iterations as f64),
                mean_cpu_seconds: mean(&|r| r.cpu_seconds),
                mean_flops,
                success_rate: if mine.is_empty() { 0.0 } else { converged as f64 / mine.len() as f64 },
                m: inst.sys.nrows(),
                n: inst.sys.ncols(),
                rank: inst.gt.rank,
                cond: inst.gt.cond_nonzero(),
                cond_full: inst.gt.cond_full(),
            }
        })
        .collect()
}

/// Fixed-width text table of a summary.
pub fn format_table(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<16} {:>7} {:>14} {:>12} {:>14} {:>8}\n",
        "method", "trials", "mean_iters", "mean_cpu_s", "mean_flops", "success"
    );
    for r in rows {
        let flops = r.mean_flops.map_or("-".to_string(), |f| format!("{f:.4e}"));
        out.push_str(&format!(
            "{:<16} {:>7} {:>14.2} {:>12.4e} {:>14} {:>8.3}\n",
            r.method, r.trials, r.mean_iters, r.mean_cpu_seconds, flops, r.success_rate
        ));
    }
    out
}
