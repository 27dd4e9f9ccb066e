//! Operation counting hooks.
//!
//! Every arithmetic kernel on the solver path is generic over [`OpCounter`].
//! Production runs use [`NoCount`], which compiles to nothing; verification
//! runs use [`FlopLedger`], which tallies each scalar operation as it is
//! performed.
//!
//! Counting convention: one flop per scalar multiply, add, subtract or
//! divide. Square roots and comparisons are free. A dot product over `s`
//! common nonzeros therefore costs `2s - 1` (the first product is assigned,
//! not added to zero).

use serde::{Deserialize, Serialize};

pub trait OpCounter {
    fn flops(&mut self, n: u64);

    #[inline(always)]
    fn flop(&mut self) {
        self.flops(1);
    }

    /// Called once when setup is finished and iterating begins.
    #[inline(always)]
    fn begin_iterations(&mut self) {}

    /// Called after every completed iteration.
    #[inline(always)]
    fn end_step(&mut self) {}

    /// Total counted so far, if this counter counts at all.
    #[inline(always)]
    fn total(&self) -> Option<u64> {
        None
    }
}

/// Counter that discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoCount;

impl OpCounter for NoCount {
    #[inline(always)]
    fn flops(&mut self, _n: u64) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
enum Phase {
    #[default]
    Init,
    Iterate,
}

/// Running flop tally split into an initialization phase and an iteration
/// phase, with an optional per-iteration breakdown.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FlopLedger {
    pub init: u64,
    pub iter: u64,
    per_step: Option<Vec<u64>>,
    phase: Phase,
    current: u64,
}

impl FlopLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger that also remembers the cost of every individual iteration.
    pub fn with_breakdown() -> Self {
        Self {
            per_step: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn per_step(&self) -> Option<&[u64]> {
        self.per_step.as_deref()
    }
}

impl OpCounter for FlopLedger {
    #[inline]
    fn flops(&mut self, n: u64) {
        match self.phase {
            Phase::Init => self.init += n,
            Phase::Iterate => {
                self.iter += n;
                self.current += n;
            }
        }
    }

    fn begin_iterations(&mut self) {
        self.phase = Phase::Iterate;
        self.current = 0;
    }

    fn end_step(&mut self) {
        if let Some(steps) = &mut self.per_step {
            steps.push(self.current);
        }
        self.current = 0;
    }

    fn total(&self) -> Option<u64> {
        Some(self.init + self.iter)
    }
}
