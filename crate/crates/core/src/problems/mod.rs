//! Test problems: generated matrices, right-hand sides with a planted
//! residual in `Null(Aᵀ)`, Matrix Market ingestion and a replayable JSON
//! container.

mod container;
mod generate;
mod mtx;
mod rhs;

pub use container::ProblemFile;
pub use generate::{gen_dense_udv, gen_dense_udv_factors, gen_sparse_random, UdvFactors};
pub use mtx::{parse_matrix_market, read_matrix_market, save_matrix_market, write_matrix_market};
pub use rhs::{make_rhs, Rhs};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_finite, norm, CsrMatrix, Matrix};
use crate::solvers::StoredGram;

/// `Ax = b` with the derived data every solver shares.
///
/// Solvers iterate on the CSR form of `A` (dense inputs are converted once)
/// and on its transpose, which serves as the column view.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: Matrix,
    csr: CsrMatrix,
    csc: CsrMatrix,
    b: Vec<f64>,
    row_sq_norms: Vec<f64>,
    gram: Option<StoredGram>,
    planted_x: Option<Vec<f64>>,
    planted_r: Option<Vec<f64>>,
}

impl LinearSystem {
    /// Fails if a row or column of `A` is zero, if `b` has the wrong length
    /// or if anything is non-finite.
    pub fn new(a: impl Into<Matrix>, b: Vec<f64>) -> Result<Self> {
        let a = a.into();
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                a.nrows()
            )));
        }
        check_finite(&b)?;
        let csr = a.to_csr();
        csr.check_no_empty_lines()?;
        let csc = csr.transpose();
        let row_sq_norms = csr.row_sq_norms()?;
        Ok(Self {
            a,
            csr,
            csc,
            b,
            row_sq_norms,
            gram: None,
            planted_x: None,
            planted_r: None,
        })
    }

    /// Attach the generating `x` and `r` of `b = Ax + r`. `r` must satisfy
    /// `‖Aᵀr‖ ≤ 1e-10 ‖A‖_F ‖r‖`.
    pub fn with_planted(mut self, x: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if x.len() != self.ncols() || r.len() != self.nrows() {
            return Err(Error::DimensionMismatch("planted vectors do not match the system".into()));
        }
        let atr = self.csr.matvec_t(&r)?;
        let frob = self.row_sq_norms.iter().sum::<f64>().sqrt();
        if norm(&atr) > 1e-10 * frob * norm(&r) {
            return Err(Error::InvalidParameter(format!(
                "planted residual is not in Null(Aᵀ): ‖Aᵀr‖ = {:e}",
                norm(&atr)
            )));
        }
        self.planted_x = Some(x);
        self.planted_r = Some(r);
        Ok(self)
    }

    /// Precompute and cache `A Aᵀ` for stored-Gram RKAS runs.
    pub fn with_gram(mut self) -> Self {
        self.store_gram();
        self
    }

    pub fn store_gram(&mut self) {
        if self.gram.is_none() {
            self.gram = Some(StoredGram::new(&self.csr));
        }
    }

    pub fn without_gram(mut self) -> Self {
        self.gram = None;
        self
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    /// `Aᵀ` in CSR form; row `j` is column `j` of `A`.
    pub fn csc(&self) -> &CsrMatrix {
        &self.csc
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn gram(&self) -> Option<&StoredGram> {
        self.gram.as_ref()
    }

    pub fn planted_x(&self) -> Option<&[f64]> {
        self.planted_x.as_deref()
    }

    pub fn planted_r(&self) -> Option<&[f64]> {
        self.planted_r.as_deref()
    }

    pub fn nrows(&self) -> usize {
        self.csr.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.csr.ncols()
    }

    pub fn row_sq_norms(&self) -> &[f64] {
        &self.row_sq_norms
    }
}

/// Which kind of matrix to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemKind {
    /// `A = U D Vᵀ` with `U ∈ R^{m×r}`, `V ∈ R^{n×r}` orthonormal and
    /// `D = diag(1 + (κ − 1)·u)`, `u` uniform on `[0, 1)`.
    DenseUdv { m: usize, n: usize, r: usize, kappa: f64 },
    /// Sparse random matrix with about `density · m · n` nonzeros and
    /// condition number `1/rc`.
    SparseRandom { m: usize, n: usize, density: f64, rc: f64 },
    /// A Matrix Market file.
    FromFile { path: PathBuf },
}

/// Everything needed to regenerate a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(flatten)]
    pub kind: ProblemKind,
    pub seed: u64,
    pub consistent: bool,
    /// `‖r‖ / ‖Ax‖` for inconsistent right-hand sides.
    #[serde(default = "default_residual_ratio")]
    pub residual_ratio: f64,
}

/// Default `‖r‖ / ‖Ax‖`.
pub const DEFAULT_RESIDUAL_RATIO: f64 = 0.5;

fn default_residual_ratio() -> f64 {
    DEFAULT_RESIDUAL_RATIO
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, seed: u64, consistent: bool) -> Self {
        Self {
            kind,
            seed,
            consistent,
            residual_ratio: DEFAULT_RESIDUAL_RATIO,
        }
    }

    pub fn dense_udv(m: usize, n: usize, r: usize, kappa: f64) -> ProblemKind {
        ProblemKind::DenseUdv { m, n, r, kappa }
    }

    pub fn sparse_random(m: usize, n: usize, density: f64, rc: f64) -> ProblemKind {
        ProblemKind::SparseRandom { m, n, density, rc }
    }

    pub fn residual_ratio(mut self, ratio: f64) -> Self {
        self.residual_ratio = ratio;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match &self.kind {
            ProblemKind::DenseUdv { m, n, r, kappa } => {
                if *m == 0 || *n == 0 || *r == 0 || *r > (*m).min(*n) {
                    return bad(format!("need 1 <= r <= min(m, n), got m={m}, n={n}, r={r}"));
                }
                if !(*kappa >= 1.0 && kappa.is_finite()) {
                    return bad(format!("kappa must be a finite value >= 1, got {kappa}"));
                }
            }
            ProblemKind::SparseRandom { m, n, density, rc } => {
                if *m == 0 || *n == 0 {
                    return bad("empty dimensions".into());
                }
                if !(*density > 0.0 && *density <= 1.0) {
                    return bad(format!("density must lie in (0, 1], got {density}"));
                }
                if !(*rc > 0.0 && *rc <= 1.0) {
                    return bad(format!("rc must lie in (0, 1], got {rc}"));
                }
                if density * (*m as f64) * (*n as f64) < (*m).max(*n) as f64 {
                    return bad(format!("density {density} is too low to give every row and column a nonzero"));
                }
            }
            ProblemKind::FromFile { .. } => {}
        }
        if !self.consistent && !(self.residual_ratio > 0.0 && self.residual_ratio.is_finite()) {
            return bad(format!("residual ratio must be positive, got {}", self.residual_ratio));
        }
        Ok(())
    }

    /// The matrix alone.
    pub fn matrix(&self) -> Result<Matrix> {
        self.validate()?;
        Ok(match &self.kind {
            ProblemKind::DenseUdv { .. } => gen_dense_udv(self)?.into(),
            ProblemKind::SparseRandom { .. } => gen_sparse_random(self)?.into(),
            ProblemKind::FromFile { path } => read_matrix_market(path)?.into(),
        })
    }

    /// Matrix plus right-hand side `b = Ax + r`.
    pub fn build(&self) -> Result<LinearSystem> {
        let a = self.matrix()?;
        let rhs = make_rhs(&a, self.seed, self.consistent, self.residual_ratio)?;
        LinearSystem::new(a, rhs.b)?.with_planted(rhs.planted_x, rhs.planted_r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn rejects_zero_rows_and_columns() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(LinearSystem::new(a, vec![1.0, 1.0]), Err(Error::ZeroRow(1))));
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[2.0, 0.0]]).unwrap();
        assert!(matches!(LinearSystem::new(a, vec![1.0, 1.0]), Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn rejects_bad_rhs() {
        let a = CsrMatrix::identity(2);
        assert!(LinearSystem::new(a.clone(), vec![1.0]).is_err());
        assert!(LinearSystem::new(a, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn planted_residual_checked() {
        let a = DenseMatrix::from_rows(&[&[1.0], &[1.0]]).unwrap();
        let sys = LinearSystem::new(a, vec![2.0, 0.0]).unwrap();
        assert!(sys.clone().with_planted(vec![1.0], vec![1.0, -1.0]).is_ok());
        assert!(sys.with_planted(vec![1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn spec_validation() {
        let ok = ProblemSpec::new(ProblemSpec::dense_udv(10, 5, 5, 2.0), 1, true);
        assert!(ok.validate().is_ok());
        for kind in [
            ProblemSpec::dense_udv(10, 5, 6, 2.0),
            ProblemSpec::dense_udv(10, 5, 3, 0.5),
            ProblemSpec::sparse_random(10, 5, 0.0, 0.5),
            ProblemSpec::sparse_random(10, 5, 0.1, 0.5),
            ProblemSpec::sparse_random(10, 5, 0.5, 0.0),
        ] {
            assert!(ProblemSpec::new(kind, 1, true).validate().is_err());
        }
    }

    #[test]
    fn spec_serde_roundtrip() {
        let spec = ProblemSpec::new(ProblemSpec::sparse_random(100, 10, 0.1, 0.5), 7, false);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"sparse_random\""));
        assert_eq!(serde_json::from_str::<ProblemSpec>(&text).unwrap(), spec);
        let legacy: ProblemSpec =
            serde_json::from_str(r#"{"kind":"dense_udv","m":4,"n":2,"r":2,"kappa":1.0,"seed":0,"consistent":true}"#)
                .unwrap();
        assert_eq!(legacy.residual_ratio, DEFAULT_RESIDUAL_RATIO);
    }
}
