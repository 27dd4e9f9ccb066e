#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use rkas::linalg::{CsrMatrix, DenseMatrix, Matrix};
use rkas::problems::make_rhs;
use rkas::sampling::rng_for;
use rkas::{analyze, GroundTruth, LinearSystem, ProblemKind, ProblemSpec};

pub struct Fixture {
    pub name: String,
    pub sys: LinearSystem,
    pub gt: GroundTruth,
}

impl Fixture {
    pub fn new(name: impl Into<String>, a: impl Into<Matrix>, b: Vec<f64>) -> Self {
        let sys = LinearSystem::new(a, b).unwrap();
        let gt = analyze(sys.a(), sys.b()).unwrap();
        Self {
            name: name.into(),
            sys,
            gt,
        }
    }
}

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = rng_for(seed, 99);
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::new(rows, cols, data).unwrap()
}

pub fn gaussian_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, 98);
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// `B C` with `B` `m × k` and `C` `k × n` Gaussian; rank `k` almost surely.
pub fn low_rank(m: usize, n: usize, k: usize, seed: u64) -> DenseMatrix {
    let b = gaussian(m, k, seed);
    let c = gaussian(k, n, seed.wrapping_add(7_919));
    let mut data = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            data[i * n + j] = (0..k).map(|t| b.get(i, t) * c.get(t, j)).sum();
        }
    }
    DenseMatrix::new(m, n, data).unwrap()
}

/// Sparse matrix with a uniformly random pattern at the given density,
/// Gaussian values, and at least one entry in every row and column.
pub fn random_sparse(m: usize, n: usize, density: f64, seed: u64) -> CsrMatrix {
    let mut rng = rng_for(seed, 97);
    let mut t = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if rng.random::<f64>() < density {
                t.push((i, j, rng.sample::<f64, _>(StandardNormal)));
            }
        }
    }
    for i in 0..m {
        t.push((i, rng.random_range(0..n), 1.0 + rng.random::<f64>()));
    }
    for j in 0..n {
        t.push((rng.random_range(0..m), j, 1.0 + rng.random::<f64>()));
    }
    CsrMatrix::from_triplets(m, n, t).unwrap()
}

pub fn three_by_two() -> Fixture {
    let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).unwrap();
    Fixture::new("3x2", a, vec![1.0, 1.0, 1.0])
}

pub fn inconsistent(name: &str, a: impl Into<Matrix>, seed: u64) -> Fixture {
    let a = a.into();
    let rhs = make_rhs(&a, seed, false, 0.5).unwrap();
    Fixture::new(name, a, rhs.b)
}

/// Small systems covering sparse and dense storage, full and deficient
/// rank, consistent and inconsistent right-hand sides.
pub fn corpus() -> Vec<Fixture> {
    let udv = ProblemSpec::new(ProblemKind::DenseUdv { m: 60, n: 15, r: 10, kappa: 3.0 }, 4, false);
    let sprs = ProblemSpec::new(ProblemKind::SparseRandom { m: 80, n: 20, density: 0.15, rc: 0.5 }, 5, false);
    let build = |name: &str, spec: ProblemSpec| {
        let sys = spec.build().unwrap();
        let gt = analyze(sys.a(), sys.b()).unwrap();
        Fixture {
            name: name.into(),
            sys,
            gt,
        }
    };
    vec![
        three_by_two(),
        Fixture::new("identity-5", CsrMatrix::identity(5), vec![1.0, -2.0, 3.0, 0.5, 4.0]),
        Fixture::new("rank1-2x2", DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap(), vec![2.0, 0.0]),
        inconsistent("gaussian-25x8", gaussian(25, 8, 1), 11),
        inconsistent("lowrank-30x20-r12", low_rank(30, 20, 12, 2), 12),
        inconsistent("sparse-uniform-40x15", random_sparse(40, 15, 0.2, 3), 13),
        build("udv-60x15-r10", udv),
        build("sprandom-80x20", sprs),
    ]
}

/// `‖Ax − A A†b‖`.
pub fn residual_err(f: &Fixture, x: &[f64]) -> f64 {
    let ax = f.sys.csr().matvec(x).unwrap();
    f.gt.residual_err_sq_from_product(&ax).sqrt()
}

/// Inconsistent when `A` is row-rank deficient, consistent otherwise.
pub fn inconsistent_or_consistent(a: DenseMatrix, seed: u64) -> Fixture {
    let m: Matrix = a.into();
    let rhs = make_rhs(&m, seed, false, 0.5).or_else(|_| make_rhs(&m, seed, true, 0.5)).unwrap();
    Fixture::new("probe", m, rhs.b)
}
