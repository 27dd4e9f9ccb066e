use crate::error::{Error, Result};
use crate::flops::{NoCount, OpCounter};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::kernels;

/// Compressed sparse row matrix in canonical form: column indices strictly
/// increasing within each row, no stored zeros, all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Validate and wrap raw CSR arrays.
    pub fn new(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidStructure(msg));
        if row_ptr.len() != rows + 1 {
            return bad(format!("row_ptr has length {}, expected {}", row_ptr.len(), rows + 1));
        }
        if row_ptr[0] != 0 {
            return bad("row_ptr[0] must be 0".into());
        }
        if col_idx.len() != values.len() || row_ptr[rows] != values.len() {
            return bad(format!(
                "row_ptr[rows] = {}, col_idx has {}, values has {}",
                row_ptr[rows],
                col_idx.len(),
                values.len()
            ));
        }
        for i in 0..rows {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            if lo > hi {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            for k in lo..hi {
                if col_idx[k] >= cols {
                    return Err(Error::IndexOutOfRange {
                        index: col_idx[k],
                        limit: cols,
                    });
                }
                if k > lo && col_idx[k] <= col_idx[k - 1] {
                    return bad(format!("column indices not strictly increasing in row {i}"));
                }
                if values[k] == 0.0 {
                    return bad(format!("explicit zero stored at ({i}, {})", col_idx[k]));
                }
            }
        }
        super::check_finite(&values)?;
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assemble from `(row, col, value)` triplets. Duplicates are summed and
    /// resulting zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for (k, &(i, j, v)) in t.iter().enumerate() {
            if i >= rows {
                return Err(Error::IndexOutOfRange { index: i, limit: rows });
            }
            if j >= cols {
                return Err(Error::IndexOutOfRange { index: j, limit: cols });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { index: k, value: v });
            }
        }
        // stable: duplicates are summed in input order
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut k = 0;
        while k < t.len() {
            let (i, j, mut v) = t[k];
            k += 1;
            while k < t.len() && t[k].0 == i && t[k].1 == j {
                v += t[k].2;
                k += 1;
            }
            if v != 0.0 {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..a.nrows() {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self {
            rows: a.nrows(),
            cols: a.ncols(),
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                data[i * self.cols + j] = v;
            }
        }
        DenseMatrix::new(self.rows, self.cols, data).expect("entries already validated")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    #[inline]
    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, vals) = self.row(i);
        idx.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// The transpose, which doubles as a compressed-column view of `self`.
    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                let k = next[j];
                col_idx[k] = i;
                values[k] = v;
                next[j] += 1;
            }
        }
        CsrMatrix {
            rows: self.cols,
            cols: self.rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let (idx, vals) = self.row(i);
                kernels::sparse_dense_dot(idx, vals, x, &mut NoCount)
            })
            .collect())
    }

    /// `Aᵀ y`.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "transposed matvec: matrix has {} rows, vector has length {}",
                self.rows,
                y.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                out[j] += v * yi;
            }
        }
        Ok(out)
    }

    pub(crate) fn row_sq_norms_with<C: OpCounter>(&self, ops: &mut C) -> Result<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                let v = kernels::sq_norm(self.row(i).1, ops);
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err(Error::ZeroRow(i))
                }
            })
            .collect()
    }

    /// Squared Euclidean norm of every row. Fails on an empty row.
    pub fn row_sq_norms(&self) -> Result<Vec<f64>> {
        self.row_sq_norms_with(&mut NoCount)
    }

    pub fn col_sq_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (&j, &v) in self.col_idx.iter().zip(&self.values) {
            out[j] += v * v;
        }
        out
    }

    /// `A · A_{i,:}ᵀ` as a dense vector of length `rows`.
    pub fn gram_column(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.rows {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.rows,
            });
        }
        let (ii, iv) = self.row(i);
        Ok((0..self.rows)
            .map(|l| {
                let (li, lv) = self.row(l);
                kernels::sparse_sparse_dot(ii, iv, li, lv, &mut NoCount).unwrap_or(0.0)
            })
            .collect())
    }

    /// Row pairs `(i, l)` with `l >= i` whose supports overlap, grouped by
    /// `i` with `l` ascending. Found through the column adjacency, so the cost
    /// scales with the overlap structure rather than with `m²`.
    pub(crate) fn overlapping_upper_pairs(&self) -> Vec<Vec<usize>> {
        let t = self.transpose();
        let mut mark = vec![usize::MAX; self.rows];
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut partners = Vec::new();
            for &j in self.row(i).0 {
                for &l in t.row(j).0 {
                    if l >= i && mark[l] != i {
                        mark[l] = i;
                        partners.push(l);
                    }
                }
            }
            partners.sort_unstable();
            out.push(partners);
        }
        out
    }

    /// `A Aᵀ` as a canonical CSR matrix. Entries that cancel to exactly zero
    /// are dropped.
    pub fn gram_matrix(&self) -> CsrMatrix {
        let pairs = self.overlapping_upper_pairs();
        let mut trip = Vec::new();
        for (i, partners) in pairs.iter().enumerate() {
            let (ii, iv) = self.row(i);
            for &l in partners {
                let (li, lv) = self.row(l);
                let v = kernels::sparse_sparse_dot(ii, iv, li, lv, &mut NoCount).unwrap_or(0.0);
                if v != 0.0 {
                    trip.push((i, l, v));
                    if l != i {
                        trip.push((l, i, v));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.rows, self.rows, trip).expect("finite by construction")
    }

    /// Fails if any row or column has no stored entry.
    pub fn check_no_empty_lines(&self) -> Result<()> {
        if let Some(i) = (0..self.rows).find(|&i| self.row_nnz(i) == 0) {
            return Err(Error::ZeroRow(i));
        }
        let mut seen = vec![false; self.cols];
        for &j in &self.col_idx {
            seen[j] = true;
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::ZeroColumn(j));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> CsrMatrix {
        CsrMatrix::from_triplets(3, 2, [(0, 0, 1.0), (1, 1, 1.0), (2, 0, 1.0), (2, 1, 1.0)]).unwrap()
    }

    #[test]
    fn new_validates_structure() {
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 2.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![0], vec![0.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![1, 1, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![0], vec![f64::INFINITY]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0), (1, 1, -1.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 1), 0.0);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let a = fixture();
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().row(0), (&[0usize, 2][..], &[1.0, 1.0][..]));
    }

    #[test]
    fn empty_lines_detected() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(a.check_no_empty_lines(), Err(Error::ZeroColumn(1))));
        let b = CsrMatrix::from_triplets(2, 1, [(0, 0, 1.0)]).unwrap();
        assert!(matches!(b.check_no_empty_lines(), Err(Error::ZeroRow(1))));
        assert!(fixture().check_no_empty_lines().is_ok());
    }

    #[test]
    fn gram_drops_cancellation() {
        // rows (1,1) and (1,-1) are orthogonal but overlap
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let g = a.gram_matrix();
        assert_eq!(g.nnz(), 2);
        assert_eq!(g.get(0, 0), 2.0);
        assert_eq!(g.get(0, 1), 0.0);
    }
}
