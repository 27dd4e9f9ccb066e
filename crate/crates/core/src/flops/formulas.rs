//! Closed-form flop counts for REK and for RKAS with and without a stored
//! Gram matrix, expressed over a [`SparsityProfile`].

use super::SparsityProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlopMethod {
    Rek,
    RkasStored,
    RkasUnstored,
}

/// Initialization cost plus a per-iteration cost function for one method.
#[derive(Debug, Clone)]
pub struct FlopFormula<'a> {
    method: FlopMethod,
    profile: &'a SparsityProfile,
    init: u64,
}

impl<'a> FlopFormula<'a> {
    pub fn method(&self) -> FlopMethod {
        self.method
    }

    pub fn init(&self) -> u64 {
        self.init
    }

    /// Cost of one iteration that selected `row` (and `col`, REK only).
    ///
    /// # Panics
    /// When the method is REK and `col` is `None`.
    pub fn step(&self, row: usize, col: Option<usize>) -> u64 {
        let p = self.profile;
        let s_ii = p.row_nnz(row) as u64;
        let t_i = p.t_size(row) as u64;
        match self.method {
            FlopMethod::Rek => {
                let m_j = p.col_nnz(col.expect("REK step needs a column index")) as u64;
                4 * s_ii + 4 * m_j + 2
            }
            FlopMethod::RkasStored => 2 * s_ii + 4 * t_i,
            FlopMethod::RkasUnstored => 2 * s_ii + 5 * t_i + 2 * p.overlap_sum(row) as u64 - 1,
        }
    }
}

fn sum_row_nnz(p: &SparsityProfile) -> u64 {
    (0..p.m()).map(|i| p.row_nnz(i) as u64).sum()
}

/// REK: `2 Σ s_ii + 2 Σ m_j − m − n` to set up, `4 s_ii + 4 m_j + 2` per step.
pub fn rek_flops(p: &SparsityProfile) -> FlopFormula<'_> {
    let col_sum: u64 = (0..p.n()).map(|j| p.col_nnz(j) as u64).sum();
    let init = 2 * sum_row_nnz(p) + 2 * col_sum - p.m() as u64 - p.n() as u64;
    FlopFormula {
        method: FlopMethod::Rek,
        profile: p,
        init,
    }
}

/// RKAS with `A Aᵀ` stored:
/// `Σ_{(i,l)∈T, i≤l} (2 s_il − 1) + 2 Σ s_ii + (3/2)|T| − 3m/2` to set up,
/// `2 s_ii + 4 |T_i|` per step.
///
/// `|T| − m` counts ordered off-diagonal pairs and is always even, so the
/// half-integer terms combine to an exact integer.
pub fn rkas_flops_stored(p: &SparsityProfile) -> FlopFormula<'_> {
    let gram: u64 = p.upper_pairs().map(|(_, _, s)| 2 * s as u64 - 1).sum();
    let off_diag = (p.t_total() - p.m()) as u64;
    debug_assert_eq!(off_diag % 2, 0);
    let init = gram + 2 * sum_row_nnz(p) + 3 * off_diag / 2;
    FlopFormula {
        method: FlopMethod::RkasStored,
        profile: p,
        init,
    }
}

/// RKAS computing `A A_{i,:}ᵀ` on the fly: `2 Σ s_ii − m` to set up,
/// `2 s_ii + 5 |T_i| + 2 Σ_{l∈T_i} s_il − 1` per step.
pub fn rkas_flops_unstored(p: &SparsityProfile) -> FlopFormula<'_> {
    let init = 2 * sum_row_nnz(p) - p.m() as u64;
    FlopFormula {
        method: FlopMethod::RkasUnstored,
        profile: p,
        init,
    }
}
