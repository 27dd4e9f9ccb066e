//! Exact (sampling-free) quantities used to check the RKAS theory on small
//! instances.

use crate::error::Result;
use crate::linalg::{dot, norm_sq};
use crate::oracle::GroundTruth;
use crate::problems::LinearSystem;

/// The RKAS update from `x` along row `i`, returned as `(x⁺, Ax⁺)`.
pub fn rkas_update(sys: &LinearSystem, x: &[f64], i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = sys.csr();
    let ax = a.matvec(x)?;
    let g = a.gram_column(i)?;
    let r: Vec<f64> = ax.iter().zip(sys.b()).map(|(p, q)| p - q).collect();
    let alpha = dot(&g, &r) / norm_sq(&g);
    let mut xp = x.to_vec();
    let (idx, vals) = a.row(i);
    for (&j, &v) in idx.iter().zip(vals) {
        xp[j] -= alpha * v;
    }
    let axp = ax.iter().zip(&g).map(|(p, q)| p - alpha * q).collect();
    Ok((xp, axp))
}

/// `E[‖Ax⁺ − A A†b‖² | x]`, summed exactly over every row with its
/// sampling probability `‖A_{i,:}‖² / ‖A‖²_F`.
pub fn expected_rkas_residual_error(sys: &LinearSystem, gt: &GroundTruth, x: &[f64]) -> Result<f64> {
    let a = sys.csr();
    let ax = a.matvec(x)?;
    let v: Vec<f64> = ax.iter().zip(&gt.projected_rhs).map(|(p, q)| p - q).collect();
    let r: Vec<f64> = ax.iter().zip(sys.b()).map(|(p, q)| p - q).collect();
    let weights = sys.row_sq_norms();
    let total: f64 = weights.iter().sum();
    let mut expectation = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let g = a.gram_column(i)?;
        let alpha = dot(&g, &r) / norm_sq(&g);
        let err: f64 = v.iter().zip(&g).map(|(vl, gl)| (vl - alpha * gl).powi(2)).sum();
        expectation += w / total * err;
    }
    Ok(expectation)
}
