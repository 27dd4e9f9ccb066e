//! Random matrix generators.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{ProblemKind, ProblemSpec};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix};
use crate::sampling::rng_for;

/// Matrix generators draw from stream 0 of the problem seed; right-hand
/// sides use stream 1.
pub(crate) const MATRIX_STREAM: u64 = 0;

/// The factors of a generated `A = U D Vᵀ`.
#[derive(Debug, Clone)]
pub struct UdvFactors {
    /// `m × r`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Diagonal of `D`, each entry in `[1, κ]`.
    pub d: Vec<f64>,
    /// `n × r`, orthonormal columns.
    pub v: DMatrix<f64>,
}

impl UdvFactors {
    pub fn product(&self) -> DenseMatrix {
        let scaled = &self.u * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.d));
        let a = scaled * self.v.transpose();
        let (m, n) = a.shape();
        let data = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)]).collect();
        DenseMatrix::new(m, n, data).expect("finite product of finite factors")
    }
}

fn udv_params(spec: &ProblemSpec) -> Result<(usize, usize, usize, f64)> {
    match spec.kind {
        ProblemKind::DenseUdv { m, n, r, kappa } => {
            spec.validate()?;
            Ok((m, n, r, kappa))
        }
        _ => Err(Error::InvalidParameter("expected a dense_udv spec".into())),
    }
}

/// Factors of the dense low-rank test matrix; `U` and `V` come from QR of
/// Gaussian matrices.
pub fn gen_dense_udv_factors(spec: &ProblemSpec) -> Result<UdvFactors> {
    let (m, n, r, kappa) = udv_params(spec)?;
    let mut rng = rng_for(spec.seed, MATRIX_STREAM);
    let mut gaussian = |rows: usize| DMatrix::from_fn(rows, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let gu = gaussian(m);
    let gv = gaussian(n);
    let u = gu.qr().q();
    let v = gv.qr().q();
    let d = (0..r).map(|_| 1.0 + (kappa - 1.0) * rng.random::<f64>()).collect();
    Ok(UdvFactors { u, d, v })
}

/// Dense `A = U D Vᵀ` of rank `r` with `σ_max/σ_min ≤ κ`.
pub fn gen_dense_udv(spec: &ProblemSpec) -> Result<DenseMatrix> {
    Ok(gen_dense_udv_factors(spec)?.product())
}

/// Rotations whose cosine or sine is below this are redrawn; they would
/// barely mix the two lines they touch.
const MIN_ROTATION_COMPONENT: f64 = 0.05;

const REPAIR_RETRIES: u64 = 100;

/// Sparse random matrix with about `density · m · n` nonzeros and singular
/// values `rc^{k/(p−1)}`, `k = 0..p`, `p = min(m, n)`, so the condition
/// number is `1/rc`.
///
/// Starts from the rectangular diagonal of those singular values and
/// applies random plane rotations to pairs of rows or columns. First every
/// empty row and column is rotated against a nonempty one; then random
/// pairs are rotated until the fill reaches the target. Rotations are
/// orthogonal, so the singular values are kept up to rounding. A result
/// with an empty row or column is redrawn, at most 100 times.
pub fn gen_sparse_random(spec: &ProblemSpec) -> Result<CsrMatrix> {
    let ProblemKind::SparseRandom { m, n, density, rc } = spec.kind else {
        return Err(Error::InvalidParameter("expected a sparse_random spec".into()));
    };
    spec.validate()?;
    for attempt in 0..=REPAIR_RETRIES {
        let mut rng = rng_for(spec.seed, MATRIX_STREAM + 2 * attempt);
        let a = rotate_diagonal(m, n, density, rc, &mut rng);
        if a.check_no_empty_lines().is_ok() {
            return Ok(a);
        }
    }
    Err(Error::Infeasible(format!(
        "no {m}x{n} matrix at density {density} without empty rows or columns after {REPAIR_RETRIES} retries"
    )))
}

struct Work {
    m: usize,
    n: usize,
    data: Vec<f64>,
    nnz: usize,
}

impl Work {
    fn rotate_rows(&mut self, p: usize, q: usize, c: f64, s: f64) {
        let n = self.n;
        for j in 0..n {
            let (x, y) = (self.data[p * n + j], self.data[q * n + j]);
            self.rotate_pair(p * n + j, q * n + j, x, y, c, s);
        }
    }

    fn rotate_cols(&mut self, p: usize, q: usize, c: f64, s: f64) {
        let n = self.n;
        for i in 0..self.m {
            let (x, y) = (self.data[i * n + p], self.data[i * n + q]);
            self.rotate_pair(i * n + p, i * n + q, x, y, c, s);
        }
    }

    #[inline]
    fn rotate_pair(&mut self, kp: usize, kq: usize, x: f64, y: f64, c: f64, s: f64) {
        let before = usize::from(x != 0.0) + usize::from(y != 0.0);
        let (nx, ny) = (c * x + s * y, c * y - s * x);
        self.data[kp] = nx;
        self.data[kq] = ny;
        let after = usize::from(nx != 0.0) + usize::from(ny != 0.0);
        self.nnz = self.nnz + after - before;
    }
}

fn angle<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let t = rng.random::<f64>() * std::f64::consts::TAU;
        let (s, c) = t.sin_cos();
        if c.abs() >= MIN_ROTATION_COMPONENT && s.abs() >= MIN_ROTATION_COMPONENT {
            return (c, s);
        }
    }
}

fn other<R: Rng>(rng: &mut R, len: usize, not: usize) -> usize {
    let k = rng.random_range(0..len - 1);
    if k >= not {
        k + 1
    } else {
        k
    }
}

fn rotate_diagonal<R: Rng>(m: usize, n: usize, density: f64, rc: f64, rng: &mut R) -> CsrMatrix {
    let p = m.min(n);
    let mut w = Work {
        m,
        n,
        data: vec![0.0; m * n],
        nnz: p,
    };
    for k in 0..p {
        let t = if p > 1 { k as f64 / (p - 1) as f64 } else { 0.0 };
        w.data[k * n + k] = rc.powf(t);
    }
    // The first p rows and columns hold the diagonal; rotate every empty
    // one against a random nonempty partner.
    for i in p..m {
        let q = rng.random_range(0..i);
        let (c, s) = angle(rng);
        w.rotate_rows(i, q, c, s);
    }
    for j in p..n {
        let q = rng.random_range(0..j);
        let (c, s) = angle(rng);
        w.rotate_cols(j, q, c, s);
    }
    let target = ((density * (m * n) as f64).round() as usize).clamp(1, m * n);
    let cap = 64 * (m + n) + 1024;
    let mut rotations = 0;
    while w.nnz < target && rotations < cap {
        let (c, s) = angle(rng);
        let use_rows = n == 1 || (m > 1 && rng.random::<bool>());
        if use_rows {
            let a = rng.random_range(0..m);
            w.rotate_rows(a, other(rng, m, a), c, s);
        } else {
            let a = rng.random_range(0..n);
            w.rotate_cols(a, other(rng, n, a), c, s);
        }
        rotations += 1;
    }
    let dense = DenseMatrix::new(m, n, w.data).expect("rotations of finite values are finite");
    CsrMatrix::from_dense(&dense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::analyze;

    fn udv(m: usize, n: usize, r: usize, kappa: f64, seed: u64) -> ProblemSpec {
        ProblemSpec::new(ProblemSpec::dense_udv(m, n, r, kappa), seed, true)
    }

    fn sparse(m: usize, n: usize, density: f64, rc: f64, seed: u64) -> ProblemSpec {
        ProblemSpec::new(ProblemSpec::sparse_random(m, n, density, rc), seed, true)
    }

    #[test]
    fn udv_factors_orthonormal() {
        let f = gen_dense_udv_factors(&udv(40, 12, 7, 3.0, 5)).unwrap();
        let eye = nalgebra::DMatrix::<f64>::identity(7, 7);
        assert!((f.u.transpose() * &f.u - &eye).norm() <= 1e-10);
        assert!((f.v.transpose() * &f.v - &eye).norm() <= 1e-10);
        assert!(f.d.iter().all(|&d| (1.0..=3.0).contains(&d)));
    }

    #[test]
    fn udv_kappa_one_is_flat() {
        let a = gen_dense_udv(&udv(30, 10, 6, 1.0, 2)).unwrap();
        let gt = analyze(&a.into(), &vec![1.0; 30]).unwrap();
        assert_eq!(gt.rank, 6);
        assert!((gt.sigma_max / gt.sigma_min - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn udv_rank_and_condition() {
        let a = gen_dense_udv(&udv(200, 40, 25, 2.0, 9)).unwrap();
        let gt = analyze(&a.into(), &vec![1.0; 200]).unwrap();
        assert_eq!(gt.rank, 25);
        assert!(gt.sigma_max / gt.sigma_min <= 2.0 + 1e-12);
    }

    #[test]
    fn generators_are_deterministic() {
        let s = udv(20, 8, 4, 2.0, 11);
        assert_eq!(gen_dense_udv(&s).unwrap(), gen_dense_udv(&s).unwrap());
        assert_ne!(gen_dense_udv(&s).unwrap(), gen_dense_udv(&udv(20, 8, 4, 2.0, 12)).unwrap());
        let s = sparse(60, 20, 0.2, 0.5, 3);
        assert_eq!(gen_sparse_random(&s).unwrap(), gen_sparse_random(&s).unwrap());
        assert_ne!(gen_sparse_random(&s).unwrap(), gen_sparse_random(&sparse(60, 20, 0.2, 0.5, 4)).unwrap());
    }

    #[test]
    fn sparse_density_and_condition() {
        for (m, n, density, rc) in [(300, 30, 0.1, 0.5), (30, 300, 0.1, 0.25), (50, 50, 0.3, 1.0)] {
            let a = gen_sparse_random(&sparse(m, n, density, rc, 1)).unwrap();
            a.check_no_empty_lines().unwrap();
            let fill = a.nnz() as f64 / (m * n) as f64;
            assert!(fill >= density * 0.95 && fill <= density * 1.6 + 0.02, "fill {fill} for {density}");
            let gt = analyze(&a.into(), &vec![1.0; m]).unwrap();
            assert_eq!(gt.rank, m.min(n));
            let cond = gt.sigma_max / gt.sigma_min;
            assert!((cond * rc - 1.0).abs() <= 1e-8, "cond {cond} for rc {rc}");
        }
    }

    #[test]
    fn sparse_full_density() {
        let a = gen_sparse_random(&sparse(40, 12, 1.0, 0.5, 8)).unwrap();
        assert_eq!(a.nnz(), 40 * 12);
    }

    #[test]
    fn wrong_kind_rejected() {
        assert!(gen_sparse_random(&udv(4, 4, 2, 2.0, 0)).is_err());
        assert!(gen_dense_udv(&sparse(4, 4, 1.0, 0.5, 0)).is_err());
    }
}
