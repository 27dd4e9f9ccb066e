//! Dense and sparse matrix storage with the handful of kernels the solvers
//! need: row extraction, products, Gram columns and norms.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`.

mod csr;
mod dense;
pub(crate) mod kernels;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;

use crate::error::{Error, Result};

/// A system matrix in either storage format.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl Matrix {
    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Dense(a) => a.nrows(),
            Matrix::Sparse(a) => a.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Dense(a) => a.ncols(),
            Matrix::Sparse(a) => a.ncols(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Sparse(_))
    }

    pub fn row_sq_norms(&self) -> Result<Vec<f64>> {
        match self {
            Matrix::Dense(a) => a.row_sq_norms(),
            Matrix::Sparse(a) => a.row_sq_norms(),
        }
    }

    pub fn col_sq_norms(&self) -> Vec<f64> {
        match self {
            Matrix::Dense(a) => a.col_sq_norms(),
            Matrix::Sparse(a) => a.col_sq_norms(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Matrix::Dense(a) => a.matvec(x),
            Matrix::Sparse(a) => a.matvec(x),
        }
    }

    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            Matrix::Dense(a) => a.matvec_t(y),
            Matrix::Sparse(a) => a.matvec_t(y),
        }
    }

    pub fn gram_column(&self, i: usize) -> Result<Vec<f64>> {
        match self {
            Matrix::Dense(a) => a.gram_column(i),
            Matrix::Sparse(a) => a.gram_column(i),
        }
    }

    /// `A Aᵀ`, stored sparse when `A` is sparse.
    pub fn gram_matrix(&self) -> Matrix {
        match self {
            Matrix::Dense(a) => Matrix::Dense(a.gram_matrix()),
            Matrix::Sparse(a) => Matrix::Sparse(a.gram_matrix()),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(a) => a.clone(),
            Matrix::Sparse(a) => a.to_dense(),
        }
    }

    /// CSR form with exact zeros dropped. The solvers always iterate on this.
    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            Matrix::Dense(a) => CsrMatrix::from_dense(a),
            Matrix::Sparse(a) => a.clone(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Matrix::Dense(a) => a.frobenius_sq(),
            Matrix::Sparse(a) => dot(a.values(), a.values()),
        }
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(a: DenseMatrix) -> Self {
        Matrix::Dense(a)
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(a: CsrMatrix) -> Self {
        Matrix::Sparse(a)
    }
}

pub(crate) fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: v[index],
        }),
        None => Ok(()),
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `‖a − b‖²`.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
