use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{norm, Matrix};
use crate::oracle::RankedSvd;
use crate::sampling::rng_for;

pub(crate) const RHS_STREAM: u64 = 1;

/// A right-hand side `b = Ax + r` and the vectors that made it.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub b: Vec<f64>,
    /// Standard normal `x`. Not `A†b` unless `A` has full column rank.
    pub planted_x: Vec<f64>,
    /// `r ∈ Null(Aᵀ)`; zero for consistent systems.
    pub planted_r: Vec<f64>,
}

/// Build `b = Ax + r` with `x` standard normal and, for inconsistent
/// systems, `r` the projection of a Gaussian vector onto `Null(Aᵀ)`
/// rescaled to `‖r‖ = ratio · ‖Ax‖`.
///
/// Fails when an inconsistent system is requested but `A` has full row
/// rank, since then `Null(Aᵀ) = {0}`.
pub fn make_rhs(a: &Matrix, seed: u64, consistent: bool, ratio: f64) -> Result<Rhs> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut rng = rng_for(seed, RHS_STREAM);
    let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let ax = a.matvec(&x)?;
    let r = if consistent {
        vec![0.0; m]
    } else {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("residual ratio must be positive, got {ratio}")));
        }
        let svd = RankedSvd::compute(a)?;
        if svd.rank >= m {
            return Err(Error::Infeasible(format!(
                "A has full row rank {m}, so no nonzero residual lies in Null(Aᵀ)"
            )));
        }
        let g: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let mut r = svd.range_complement(&g);
        let scale = ratio * norm(&ax) / norm(&r);
        r.iter_mut().for_each(|v| *v *= scale);
        r
    };
    let b = ax.iter().zip(&r).map(|(p, q)| p + q).collect();
    Ok(Rhs {
        b,
        planted_x: x,
        planted_r: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CsrMatrix, DenseMatrix};
    use crate::oracle::analyze;

    fn three_by_two() -> Matrix {
        DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).unwrap().into()
    }

    #[test]
    fn consistent_has_zero_residual() {
        let a = three_by_two();
        let rhs = make_rhs(&a, 4, true, 0.5).unwrap();
        assert!(rhs.planted_r.iter().all(|&v| v == 0.0));
        let gt = analyze(&a, &rhs.b).unwrap();
        assert!(norm(&gt.e) <= 1e-12);
    }

    #[test]
    fn inconsistent_residual_is_orthogonal() {
        let a = three_by_two();
        let rhs = make_rhs(&a, 4, false, 0.5).unwrap();
        let atr = a.matvec_t(&rhs.planted_r).unwrap();
        assert!(norm(&atr) <= 1e-12 * norm(&rhs.planted_r));
        let ax = a.matvec(&rhs.planted_x).unwrap();
        assert!((norm(&rhs.planted_r) - 0.5 * norm(&ax)).abs() <= 1e-12 * norm(&ax));
        let gt = analyze(&a, &rhs.b).unwrap();
        assert!(norm(&gt.e) > 0.1);
    }

    #[test]
    fn full_row_rank_cannot_be_inconsistent() {
        let a: Matrix = CsrMatrix::identity(4).into();
        assert!(matches!(make_rhs(&a, 0, false, 0.5), Err(Error::Infeasible(_))));
        assert!(make_rhs(&a, 0, true, 0.5).is_ok());
    }

    #[test]
    fn ratio_must_be_positive() {
        assert!(make_rhs(&three_by_two(), 0, false, 0.0).is_err());
    }
}
