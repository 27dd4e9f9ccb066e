//! Benchmark harness for the `rkas` solvers: experiment plans, interleaved
//! timing trials, per-instance property checks and CSV output.

pub mod bench;
pub mod output;
pub mod plan;
pub mod sweep;
pub mod verify;

pub use bench::{run_bench, summarize, timer_resolution, BenchResult, SummaryRow, TrialRow};
pub use plan::{ExperimentPlan, Instance};
pub use verify::{verify, Check};
