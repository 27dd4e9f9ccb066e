//! Runs the guide's code snippets as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}

#[doc = include_str!("../../../book/src/solvers.md")]
pub mod solvers {}

#[doc = include_str!("../../../book/src/ground-truth.md")]
pub mod ground_truth {}

#[doc = include_str!("../../../book/src/flops.md")]
pub mod flops {}

#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}
