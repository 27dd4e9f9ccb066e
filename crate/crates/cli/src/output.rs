//! CSV writers and the JSON sidecar that makes a result file replayable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rkas::sampling::PRNG_IDENTITY;
use rkas::solvers::ConvergenceRecord;
use serde::Serialize;

use crate::bench::{SummaryRow, TrialRow};

/// Everything needed to rerun the command that produced a CSV.
#[derive(Debug, Serialize)]
pub struct Sidecar<'a, P: Serialize> {
    pub command: &'a str,
    pub library_version: &'static str,
    pub prng: &'static str,
    pub timer_resolution_seconds: Option<f64>,
    pub plan: &'a P,
}

impl<'a, P: Serialize> Sidecar<'a, P> {
    pub fn new(command: &'a str, plan: &'a P) -> Self {
        Self {
            command,
            library_version: env!("CARGO_PKG_VERSION"),
            prng: PRNG_IDENTITY,
            timer_resolution_seconds: None,
            plan,
        }
    }

    pub fn write(&self, csv_path: &Path) -> std::io::Result<PathBuf> {
        let path = sidecar_path(csv_path);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }
}

/// `results.csv` → `results.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// `results.csv` → `results.trials.csv`.
pub fn trials_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv_path.with_file_name(format!("{stem}.trials.csv"))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_records<W: Write>(w: W, records: &[ConvergenceRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "rse", "residual_err_sq", "elapsed", "flops"])?;
    for r in records {
        out.write_record([
            r.iter.to_string(),
            format!("{:e}", r.rse),
            opt(r.residual_err_sq.map(|v| format!("{v:e}"))),
            format!("{:e}", r.elapsed),
            opt(r.flops),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trials<W: Write>(w: W, rows: &[TrialRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "method", "trial", "seed", "stream", "status", "iterations", "cpu_seconds", "final_rse", "flops", "error",
    ])?;
    for r in rows {
        out.write_record([
            r.method.clone(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.stream.to_string(),
            opt(r.status),
            r.iterations.to_string(),
            format!("{:e}", r.cpu_seconds),
            format!("{:e}", r.final_rse),
            opt(r.flops),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "method",
        "trials",
        "mean_iters",
        "mean_cpu_seconds",
        "mean_flops",
        "success_rate",
        "m",
        "n",
        "rank",
        "cond",
        "cond_full",
    ])?;
    for r in rows {
        out.write_record([
            r.method.clone(),
            r.trials.to_string(),
            r.mean_iters.to_string(),
            format!("{:e}", r.mean_cpu_seconds),
            opt(r.mean_flops),
            r.success_rate.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.rank.to_string(),
            format!("{:e}", r.cond),
            format!("{:e}", r.cond_full),
        ])?;
    }
    out.flush()?;
    Ok(())
}
