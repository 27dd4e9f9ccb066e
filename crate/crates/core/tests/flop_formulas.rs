//! Closed-form flop counts against counting kernels.

mod common;

use common::{gaussian, random_sparse};
use proptest::prelude::*;
use rkas::flops::{formula_for, instrumented_count, SparsityProfile};
use rkas::linalg::{CsrMatrix, DenseMatrix};
use rkas::solvers::SolverConfig;
use rkas::{LinearSystem, ProblemKind, ProblemSpec};

fn corpus() -> Vec<(String, LinearSystem)> {
    let mut out = vec![
        ("identity-6".to_string(), LinearSystem::new(CsrMatrix::identity(6), vec![1.0; 6]).unwrap()),
        (
            "3x2".to_string(),
            LinearSystem::new(
                DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).unwrap(),
                vec![1.0; 3],
            )
            .unwrap(),
        ),
        ("dense-8x5".to_string(), LinearSystem::new(gaussian(8, 5, 1), vec![1.0; 8]).unwrap()),
    ];
    for (k, density) in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5].into_iter().enumerate() {
        let a = random_sparse(30, 20, density, k as u64);
        out.push((format!("uniform-30x20-{density}"), LinearSystem::new(a, vec![1.0; 30]).unwrap()));
    }
    for density in [0.05, 0.2] {
        let spec = ProblemSpec::new(ProblemKind::SparseRandom { m: 30, n: 20, density, rc: 0.5 }, 2, true);
        out.push((format!("rotated-30x20-{density}"), spec.build().unwrap()));
    }
    out
}

#[test]
fn instrumented_counts_match_formulas() {
    let configs = [SolverConfig::rek(), SolverConfig::rkas(), SolverConfig::rkas().store_gram(false)];
    let corpus = corpus();
    assert!(corpus.len() >= 10);
    for (name, sys) in &corpus {
        let profile = SparsityProfile::new(sys.csr());
        for cfg in &configs {
            let formula = formula_for(&profile, cfg).unwrap();
            let run = instrumented_count(sys, &cfg.clone().seed(3), 100).unwrap();
            assert_eq!(run.ledger.init, formula.init(), "{name} {:?} init", formula.method());
            let steps = run.ledger.per_step().unwrap();
            assert_eq!(steps.len(), 100);
            for (k, (&(i, j), &measured)) in run.indices.iter().zip(steps).enumerate() {
                assert_eq!(measured, formula.step(i, j), "{name} {:?} step {k} (row {i})", formula.method());
            }
            assert_eq!(run.ledger.iter, steps.iter().sum::<u64>());
        }
    }
}

#[test]
fn rk_step_count_is_literal() {
    // 2s − 1 for the dot, then subtract, divide, scale, then the 2s update.
    let sys = LinearSystem::new(random_sparse(20, 10, 0.3, 9), vec![1.0; 20]).unwrap();
    let run = instrumented_count(&sys, &SolverConfig::rk(0.5), 50).unwrap();
    for (&(i, _), &c) in run.indices.iter().zip(run.ledger.per_step().unwrap()) {
        assert_eq!(c, 4 * sys.csr().row_nnz(i) as u64 + 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_partition_and_symmetry(m in 1usize..15, n in 1usize..15, density in 0.05f64..0.9, seed in any::<u64>()) {
        let a = random_sparse(m, n, density, seed);
        let p = SparsityProfile::new(&a);
        prop_assert_eq!((0..m).map(|i| p.t_size(i)).sum::<usize>(), p.t_total());
        let dense = a.to_dense();
        for i in 0..m {
            prop_assert_eq!(p.s(i, i), a.row_nnz(i));
            for l in 0..m {
                prop_assert_eq!(p.s(i, l), p.s(l, i));
                let s = (0..n).filter(|&j| dense.get(i, j) != 0.0 && dense.get(l, j) != 0.0).count();
                prop_assert_eq!(p.s(i, l), s);
            }
            for &(_, s) in p.overlaps(i) {
                prop_assert!(s >= 1);
            }
        }
        for j in 0..n {
            prop_assert_eq!(p.col_nnz(j), (0..m).filter(|&i| dense.get(i, j) != 0.0).count());
        }
    }

    #[test]
    fn dense_profiles_reduce_to_closed_forms(m in 1usize..10, n in 1usize..10) {
        let data: Vec<f64> = (0..m * n).map(|k| 1.0 + k as f64).collect();
        let a = CsrMatrix::from_dense(&DenseMatrix::new(m, n, data).unwrap());
        let p = SparsityProfile::new(&a);
        let (m64, n64) = (m as u64, n as u64);
        prop_assert_eq!(p.t_total(), m * m);
        let rek = rkas::flops::rek_flops(&p);
        prop_assert_eq!(rek.init(), 4 * m64 * n64 - m64 - n64);
        prop_assert_eq!(rek.step(0, Some(0)), 4 * n64 + 4 * m64 + 2);
        prop_assert_eq!(rkas::flops::rkas_flops_stored(&p).step(0, None), 2 * n64 + 4 * m64);
        prop_assert_eq!(rkas::flops::rkas_flops_unstored(&p).step(0, None), 2 * n64 + 5 * m64 + 2 * m64 * n64 - 1);
    }
}
