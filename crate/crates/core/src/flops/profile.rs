use crate::linalg::CsrMatrix;

/// Row-overlap structure of a sparse matrix.
///
/// For each row `i` this keeps every row `l` whose support intersects row
/// `i` (the slice `T_i`, including `l = i`) together with the overlap size
/// `s_{i,l} = nnz(A_{i,:} ∘ A_{l,:})`. Pairs are stored ordered, so
/// `(i, l)` and `(l, i)` both appear and `|T| = Σ |T_i|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityProfile {
    m: usize,
    n: usize,
    overlaps: Vec<Vec<(usize, usize)>>,
    col_nnz: Vec<usize>,
    t_total: usize,
}

impl SparsityProfile {
    /// Exact profile through the column adjacency: only row pairs sharing a
    /// column are ever visited.
    pub fn new(a: &CsrMatrix) -> Self {
        let (m, n) = (a.nrows(), a.ncols());
        let cols = a.transpose();
        let mut count = vec![0usize; m];
        let mut touched = Vec::new();
        let mut overlaps = Vec::with_capacity(m);
        for i in 0..m {
            for &j in a.row(i).0 {
                for &l in cols.row(j).0 {
                    if count[l] == 0 {
                        touched.push(l);
                    }
                    count[l] += 1;
                }
            }
            touched.sort_unstable();
            let row: Vec<(usize, usize)> = touched.iter().map(|&l| (l, count[l])).collect();
            for &l in &touched {
                count[l] = 0;
            }
            touched.clear();
            overlaps.push(row);
        }
        let t_total = overlaps.iter().map(Vec::len).sum();
        let col_nnz = (0..n).map(|j| cols.row_nnz(j)).collect();
        Self {
            m,
            n,
            overlaps,
            col_nnz,
            t_total,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `s_{i,l}`, zero when the rows do not overlap.
    pub fn s(&self, i: usize, l: usize) -> usize {
        let row = &self.overlaps[i];
        row.binary_search_by_key(&l, |&(k, _)| k)
            .map_or(0, |p| row[p].1)
    }

    /// `s_{i,i}`, the number of nonzeros in row `i`.
    pub fn row_nnz(&self, i: usize) -> usize {
        self.s(i, i)
    }

    /// `|T_i|`.
    pub fn t_size(&self, i: usize) -> usize {
        self.overlaps[i].len()
    }

    /// `|T|`, counted over ordered pairs.
    pub fn t_total(&self) -> usize {
        self.t_total
    }

    /// `m_j`, the number of nonzeros in column `j`.
    pub fn col_nnz(&self, j: usize) -> usize {
        self.col_nnz[j]
    }

    /// `(l, s_{i,l})` for every `l` in `T_i`, ascending in `l`.
    pub fn overlaps(&self, i: usize) -> &[(usize, usize)] {
        &self.overlaps[i]
    }

    /// `Σ_{l ∈ T_i} s_{i,l}`.
    pub fn overlap_sum(&self, i: usize) -> usize {
        self.overlaps[i].iter().map(|&(_, s)| s).sum()
    }

    /// Unordered pairs `(i, l)` with `i <= l`.
    pub fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.overlaps.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |&&(l, _)| l >= i)
                .map(move |&(l, s)| (i, l, s))
        })
    }
}
