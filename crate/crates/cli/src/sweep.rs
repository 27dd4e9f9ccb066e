//! Size sweeps producing plot-ready CSV: one row per (size, method), with
//! the size on the x axis and mean CPU time or iterations on the y axis.

use std::io::Write;

use rkas::{ProblemKind, Result};
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, SummaryRow};
use crate::plan::{ExperimentPlan, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    M,
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: Axis,
    pub value: usize,
    pub summary: SummaryRow,
}

/// Rerun `plan` with its problem's `m` (or `n`) set to each of `values`.
pub fn run_sweep(plan: &ExperimentPlan, axis: Axis, values: &[usize]) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::new();
    for &value in values {
        let mut p = plan.clone();
        match (&mut p.problem.kind, axis) {
            (ProblemKind::DenseUdv { m, .. } | ProblemKind::SparseRandom { m, .. }, Axis::M) => *m = value,
            (ProblemKind::DenseUdv { n, .. } | ProblemKind::SparseRandom { n, .. }, Axis::N) => *n = value,
            (ProblemKind::FromFile { .. }, _) => {
                return Err(rkas::Error::InvalidParameter("cannot sweep the size of a file-backed problem".into()))
            }
        }
        let inst = Instance::generate(&p.problem)?;
        for summary in run_bench(&inst, &p)?.summary {
            points.push(SweepPoint { axis, value, summary });
        }
    }
    Ok(points)
}

pub fn write_sweep<W: Write>(w: W, points: &[SweepPoint]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["axis", "x", "method", "mean_cpu_seconds", "mean_iters", "mean_flops", "success_rate", "cond"])?;
    for p in points {
        let s = &p.summary;
        out.write_record([
            match p.axis {
                Axis::M => "m".to_string(),
                Axis::N => "n".to_string(),
            },
            p.value.to_string(),
            s.method.clone(),
            format!("{:e}", s.mean_cpu_seconds),
            s.mean_iters.to_string(),
            s.mean_flops.map(|f| f.to_string()).unwrap_or_default(),
            s.success_rate.to_string(),
            format!("{:e}", s.cond),
        ])?;
    }
    out.flush()?;
    Ok(())
}
