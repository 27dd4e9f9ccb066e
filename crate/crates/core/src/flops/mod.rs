//! Sparse flop accounting: the row-overlap structure of `A`, closed-form
//! per-method costs, and an instrumented counter to check them against.

mod counter;
mod formulas;
mod profile;

pub use counter::{FlopLedger, NoCount, OpCounter};
pub use formulas::{rek_flops, rkas_flops_stored, rkas_flops_unstored, FlopFormula, FlopMethod};
pub use profile::SparsityProfile;

use std::borrow::Cow;

use crate::error::Result;
use crate::problems::LinearSystem;
use crate::solvers::{Solver, SolverConfig};

/// Measured counts from an instrumented run.
#[derive(Debug, Clone)]
pub struct InstrumentedRun {
    /// Setup and iteration tallies, with the per-iteration breakdown.
    pub ledger: FlopLedger,
    /// The `(row, column)` drawn at each iteration; the column is `None`
    /// except for REK.
    pub indices: Vec<(usize, Option<usize>)>,
}

/// Run `steps` iterations of `cfg.method` with counting kernels.
///
/// Setup is always charged in full: if `sys` carries a cached Gram matrix
/// it is ignored here and rebuilt under the counter.
pub fn instrumented_count(sys: &LinearSystem, cfg: &SolverConfig, steps: usize) -> Result<InstrumentedRun> {
    let sys: Cow<'_, LinearSystem> = if sys.gram().is_some() {
        Cow::Owned(sys.clone().without_gram())
    } else {
        Cow::Borrowed(sys)
    };
    let mut solver = Solver::with_counter(&sys, cfg.clone(), FlopLedger::with_breakdown())?;
    let indices = (0..steps).map(|_| solver.step()).collect();
    let (_, ledger) = solver.into_parts();
    Ok(InstrumentedRun { ledger, indices })
}

/// The closed-form cost model matching `cfg`, if `cfg` is REK or RKAS.
pub fn formula_for<'a>(p: &'a SparsityProfile, cfg: &SolverConfig) -> Option<FlopFormula<'a>> {
    use crate::solvers::Method;
    match (cfg.method, cfg.store_gram) {
        (Method::Rek, _) => Some(rek_flops(p)),
        (Method::Rkas, true) => Some(rkas_flops_stored(p)),
        (Method::Rkas, false) => Some(rkas_flops_unstored(p)),
        (Method::Rk, _) => None,
    }
}
