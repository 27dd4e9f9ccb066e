//! Counted scalar kernels shared by the matrix types and the solvers.
//!
//! Each reduction assigns its first term and accumulates the rest strictly in
//! index order. Several bit-identity guarantees (stored vs on-the-fly Gram
//! columns) depend on that order, so do not reassociate these loops.

use crate::flops::OpCounter;

/// `Σ v_k²`, costing `2·len − 1`.
#[inline]
pub(crate) fn sq_norm<C: OpCounter>(vals: &[f64], ops: &mut C) -> f64 {
    let mut it = vals.iter();
    let Some(&first) = it.next() else {
        return 0.0;
    };
    let mut acc = first * first;
    ops.flop();
    for &v in it {
        acc += v * v;
        ops.flops(2);
    }
    acc
}

/// Sparse row times dense vector, costing `2·nnz − 1`.
#[inline]
pub(crate) fn sparse_dense_dot<C: OpCounter>(
    cols: &[usize],
    vals: &[f64],
    x: &[f64],
    ops: &mut C,
) -> f64 {
    let mut it = cols.iter().zip(vals);
    let Some((&j, &v)) = it.next() else {
        return 0.0;
    };
    let mut acc = v * x[j];
    ops.flop();
    for (&j, &v) in it {
        acc += v * x[j];
        ops.flops(2);
    }
    acc
}

/// Merge-join dot product of two sorted sparse vectors, costing `2s − 1`
/// where `s` is the number of common indices. Products are formed as
/// `a_k · b_k`.
#[inline]
pub(crate) fn sparse_sparse_dot<C: OpCounter>(
    a_idx: &[usize],
    a_val: &[f64],
    b_idx: &[usize],
    b_val: &[f64],
    ops: &mut C,
) -> Option<f64> {
    let (mut p, mut q) = (0, 0);
    let mut acc: Option<f64> = None;
    while p < a_idx.len() && q < b_idx.len() {
        match a_idx[p].cmp(&b_idx[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                let prod = a_val[p] * b_val[q];
                acc = Some(match acc {
                    None => {
                        ops.flop();
                        prod
                    }
                    Some(s) => {
                        ops.flops(2);
                        s + prod
                    }
                });
                p += 1;
                q += 1;
            }
        }
    }
    acc
}

/// `y ← y − alpha · v` on the sparse support of `v`, costing `2·nnz`.
#[inline]
pub(crate) fn sparse_axpy_sub<C: OpCounter>(
    y: &mut [f64],
    alpha: f64,
    idx: &[usize],
    vals: &[f64],
    ops: &mut C,
) {
    for (&k, &v) in idx.iter().zip(vals) {
        y[k] -= alpha * v;
    }
    ops.flops(2 * idx.len() as u64);
}
