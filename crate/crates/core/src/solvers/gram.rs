use crate::flops::OpCounter;
use crate::linalg::{kernels, CsrMatrix};

/// `B = A Aᵀ` stored for RKAS, together with `‖B_{:,i}‖²` for every `i`.
///
/// The pattern is exactly the overlap set `T`: an entry is kept for every
/// pair of rows with intersecting support, even when the inner product
/// happens to cancel to zero. Rows of `B` are sorted, so each column `i`
/// (equal to row `i` by symmetry) is read in ascending `l`.
#[derive(Debug, Clone)]
pub struct StoredGram {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    vals: Vec<f64>,
    col_norm_sq: Vec<f64>,
}

impl StoredGram {
    pub fn new(a: &CsrMatrix) -> Self {
        Self::build(a, &mut crate::flops::NoCount)
    }

    /// Cost: `Σ_{i≤l} (2 s_il − 1)` for the upper triangle, one multiply per
    /// upper entry to square it, and `|T_i| − 1` additions per column norm.
    pub(crate) fn build<C: OpCounter>(a: &CsrMatrix, ops: &mut C) -> Self {
        let m = a.nrows();
        let pairs = a.overlapping_upper_pairs();
        let mut upper: Vec<Vec<(usize, f64, f64)>> = Vec::with_capacity(m);
        for (i, partners) in pairs.iter().enumerate() {
            let (ii, iv) = a.row(i);
            let mut row = Vec::with_capacity(partners.len());
            for &l in partners {
                let (li, lv) = a.row(l);
                let v = kernels::sparse_sparse_dot(ii, iv, li, lv, ops)
                    .expect("overlapping rows share a column");
                let sq = v * v;
                ops.flop();
                row.push((l, v, sq));
            }
            upper.push(row);
        }
        // lower[l] collects (k, B_kl, B_kl²) for k < l, ascending in k
        let mut lower: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); m];
        for (k, row) in upper.iter().enumerate() {
            for &(l, v, sq) in row {
                if l != k {
                    lower[l].push((k, v, sq));
                }
            }
        }
        let total: usize = upper.iter().zip(&lower).map(|(u, l)| u.len() + l.len()).sum();
        let mut ptr = Vec::with_capacity(m + 1);
        let mut idx = Vec::with_capacity(total);
        let mut vals = Vec::with_capacity(total);
        let mut col_norm_sq = Vec::with_capacity(m);
        ptr.push(0);
        for i in 0..m {
            let mut acc: Option<f64> = None;
            for &(l, v, sq) in lower[i].iter().chain(&upper[i]) {
                idx.push(l);
                vals.push(v);
                acc = Some(match acc {
                    None => sq,
                    Some(s) => {
                        ops.flop();
                        s + sq
                    }
                });
            }
            col_norm_sq.push(acc.unwrap_or(0.0));
            ptr.push(idx.len());
        }
        Self {
            ptr,
            idx,
            vals,
            col_norm_sq,
        }
    }

    pub fn nrows(&self) -> usize {
        self.col_norm_sq.len()
    }

    /// Column `i` of `B` as `(row indices, values)`.
    #[inline]
    pub fn column(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.ptr[i], self.ptr[i + 1]);
        (&self.idx[lo..hi], &self.vals[lo..hi])
    }

    /// `‖A A_{i,:}ᵀ‖²`.
    #[inline]
    pub fn column_norm_sq(&self, i: usize) -> f64 {
        self.col_norm_sq[i]
    }

    pub fn stored_entries(&self) -> usize {
        self.idx.len()
    }
}

/// Workspace for forming `A A_{i,:}ᵀ` on the fly through the column view.
#[derive(Debug, Clone)]
pub(crate) struct GramScratch {
    acc: Vec<f64>,
    seen: Vec<bool>,
    pub touched: Vec<usize>,
}

impl GramScratch {
    pub fn new(m: usize) -> Self {
        Self {
            acc: vec![0.0; m],
            seen: vec![false; m],
            touched: Vec::new(),
        }
    }

    /// Scatter `Σ_j a_ij · A_{:,j}` into the workspace. Afterwards `touched`
    /// lists `T_i` ascending and [`GramScratch::value`] holds each entry.
    /// Cost `Σ_{l∈T_i} (2 s_il − 1)`.
    pub fn form<C: OpCounter>(&mut self, a: &CsrMatrix, cols: &CsrMatrix, i: usize, ops: &mut C) {
        for &l in &self.touched {
            self.seen[l] = false;
        }
        self.touched.clear();
        let (ii, iv) = a.row(i);
        for (&j, &aij) in ii.iter().zip(iv) {
            let (li, lv) = cols.row(j);
            for (&l, &alj) in li.iter().zip(lv) {
                let prod = aij * alj;
                ops.flop();
                if self.seen[l] {
                    self.acc[l] += prod;
                    ops.flop();
                } else {
                    self.seen[l] = true;
                    self.acc[l] = prod;
                    self.touched.push(l);
                }
            }
        }
        self.touched.sort_unstable();
    }

    #[inline]
    pub fn value(&self, l: usize) -> f64 {
        self.acc[l]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flops::FlopLedger;
    use crate::linalg::DenseMatrix;

    #[test]
    fn stored_gram_keeps_cancelled_entries() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let g = StoredGram::new(&a);
        assert_eq!(g.stored_entries(), 4);
        assert_eq!(g.column(0), (&[0usize, 1][..], &[2.0, 0.0][..]));
        assert_eq!(g.column_norm_sq(0), 4.0);
    }

    #[test]
    fn stored_and_scattered_columns_agree_bitwise() {
        let d = DenseMatrix::from_rows(&[
            [0.3, 0.0, -1.7, 0.0],
            [0.0, 2.1, 0.4, 0.0],
            [1.1, 0.0, 0.0, 0.9],
            [0.0, -0.6, 0.0, 1.3],
            [0.7, 0.2, 0.5, 0.0],
        ])
        .unwrap();
        let a = CsrMatrix::from_dense(&d);
        let cols = a.transpose();
        let g = StoredGram::new(&a);
        let mut s = GramScratch::new(5);
        for i in 0..5 {
            s.form(&a, &cols, i, &mut crate::flops::NoCount);
            let (idx, vals) = g.column(i);
            assert_eq!(idx, &s.touched[..]);
            for (&l, &v) in idx.iter().zip(vals) {
                assert_eq!(v.to_bits(), s.value(l).to_bits());
            }
        }
    }

    #[test]
    fn build_cost_on_three_by_two() {
        let a = CsrMatrix::from_dense(&DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap());
        let mut l = FlopLedger::new();
        let g = StoredGram::build(&a, &mut l);
        // 7 for the upper dots, 5 squares, (2-1)+(2-1)+(3-1) additions
        assert_eq!(l.init, 7 + 5 + 4);
        assert_eq!(g.column(2).1, &[1.0, 1.0, 2.0]);
        assert_eq!(g.column_norm_sq(2), 6.0);
    }
}
