//! The SVD oracle against an independent Tikhonov-extrapolation solver.

mod common;

use common::{gaussian, gaussian_vec, low_rank, Fixture};
use rkas::analyze;
use rkas::linalg::{norm, DenseMatrix, Matrix};
use rkas::oracle::nullspace_residual;

/// Solve the symmetric positive definite system `M y = c` by Gaussian
/// elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut c: Vec<f64>) -> Vec<f64> {
    let n = c.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        m.swap(k, p);
        c.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            c[i] -= f * c[k];
        }
    }
    let mut y = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * y[j]).sum();
        y[k] = (c[k] - s) / m[k][k];
    }
    y
}

/// `(AᵀA + δI)⁻¹ Aᵀb`.
fn ridge(a: &DenseMatrix, b: &[f64], delta: f64) -> Vec<f64> {
    let (rows, n) = (a.nrows(), a.ncols());
    let mut m = vec![vec![0.0; n]; n];
    let mut c = vec![0.0; n];
    for i in 0..rows {
        for p in 0..n {
            c[p] += a.get(i, p) * b[i];
            for q in 0..n {
                m[p][q] += a.get(i, p) * a.get(i, q);
            }
        }
    }
    for (p, row) in m.iter_mut().enumerate() {
        row[p] += delta;
    }
    solve(m, c)
}

/// Richardson extrapolation of the ridge path to `δ → 0`, which converges
/// to the minimum-norm least-squares solution for any rank.
fn ridge_limit(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let d = 1e-6 * a.frobenius_sq();
    let x1 = ridge(a, b, d);
    let x2 = ridge(a, b, d / 2.0);
    let x4 = ridge(a, b, d / 4.0);
    // Second-order Richardson on δ, δ/2, δ/4.
    (0..x1.len()).map(|k| (8.0 * x4[k] - 6.0 * x2[k] + x1[k]) / 3.0).collect()
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(1e-300)
}

fn check(name: &str, a: DenseMatrix, b: Vec<f64>, consistent: bool, full_rank: bool) {
    let gt = analyze(&a.clone().into(), &b).unwrap();
    let reference = ridge_limit(&a, &b);
    assert!(rel_diff(&gt.x_star, &reference) <= 1e-6, "{name}: {}", rel_diff(&gt.x_star, &reference));
    assert_eq!(gt.rank == a.ncols(), full_rank, "{name}: rank {}", gt.rank);
    assert_eq!(norm(&gt.e) <= 1e-10 * norm(&b), consistent, "{name}: ‖e‖ = {}", norm(&gt.e));

    let m: Matrix = a.into();
    let ax = m.matvec(&gt.x_star).unwrap();
    let res: Vec<f64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
    let normal = m.matvec_t(&res).unwrap();
    assert!(norm(&normal) <= 1e-10 * gt.frob_norm * norm(&b), "{name}: normal equations");
    assert!(norm(&gt.row_space_complement(&gt.x_star)) <= 1e-10 * norm(&gt.x_star), "{name}: range");
    assert!(norm(&m.matvec_t(&gt.e).unwrap()) <= 1e-10 * gt.frob_norm * norm(&b), "{name}: Aᵀe");
}

#[test]
fn four_consistency_rank_cases() {
    // consistent, full column rank
    let a = gaussian(12, 5, 1);
    let b = a.matvec(&gaussian_vec(5, 2)).unwrap();
    check("consistent/full", a, b, true, true);
    // consistent, rank deficient
    let a = low_rank(12, 6, 3, 3);
    let b = a.matvec(&gaussian_vec(6, 4)).unwrap();
    check("consistent/deficient", a, b, true, false);
    // inconsistent, full column rank
    let a = gaussian(12, 5, 5);
    check("inconsistent/full", a, gaussian_vec(12, 6), false, true);
    // inconsistent, rank deficient
    let a = low_rank(12, 6, 3, 7);
    check("inconsistent/deficient", a, gaussian_vec(12, 8), false, false);
}

#[test]
fn wide_and_square_cases() {
    let a = gaussian(4, 9, 10);
    check("wide", a, gaussian_vec(4, 11), true, false);
    let a = low_rank(7, 7, 5, 12);
    check("square/deficient", a, gaussian_vec(7, 13), false, false);
}

#[test]
fn row_permutation_invariance() {
    let a = low_rank(15, 8, 5, 20);
    let b = gaussian_vec(15, 21);
    let perm: Vec<usize> = (0..15).map(|i| (i * 7) % 15).collect();
    let rows: Vec<Vec<f64>> = perm.iter().map(|&i| a.row(i).to_vec()).collect();
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let pa = DenseMatrix::from_rows(&refs).unwrap();
    let pb: Vec<f64> = perm.iter().map(|&i| b[i]).collect();
    let g1 = analyze(&a.into(), &b).unwrap();
    let g2 = analyze(&pa.into(), &pb).unwrap();
    assert!(rel_diff(&g2.x_star, &g1.x_star) <= 1e-8);
    assert!((g1.sigma_min - g2.sigma_min).abs() <= 1e-8 * g1.sigma_min);
    assert!((g1.sigma_max - g2.sigma_max).abs() <= 1e-8 * g1.sigma_max);
    assert_eq!(g1.rank, g2.rank);
}

#[test]
fn nullspace_residual_is_orthogonal_to_columns() {
    let a: Matrix = gaussian(50, 10, 30).into();
    let g = gaussian_vec(50, 31);
    let r = nullspace_residual(&a, &g).unwrap();
    let frob = a.frobenius_sq().sqrt();
    assert!(norm(&a.matvec_t(&r).unwrap()) <= 1e-10 * frob * norm(&g));
    assert!(norm(&r) > 0.5 * norm(&g));
}

#[test]
fn gram_column_norm_bounded_by_spectral_norm() {
    for f in common::corpus() {
        for i in 0..f.sys.nrows() {
            let g = f.sys.csr().gram_column(i).unwrap();
            let bound = f.gt.sigma_max * f.sys.row_sq_norms()[i].sqrt();
            assert!(norm(&g) <= bound * (1.0 + 1e-12), "{} row {i}", f.name);
            assert!(g[i] > 0.0);
        }
    }
}

#[test]
fn table2_condition_columns_both_reported() {
    // Rank deficient: the full-spectrum ratio is huge or infinite while the
    // nonzero-spectrum ratio stays moderate.
    let f = Fixture::new("lowrank", low_rank(10, 6, 4, 40), gaussian_vec(10, 41));
    assert_eq!(f.gt.rank, 4);
    assert!(f.gt.cond_nonzero() < 1e3);
    assert!(f.gt.cond_full() > 1e12);
}
