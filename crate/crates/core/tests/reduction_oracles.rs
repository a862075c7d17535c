mod common;

use common::*;
use nidsbench_core::dataset::DesignMatrix;
use nidsbench_core::matrix::Matrix;
use nidsbench_core::reduction::{
    apply_selection, correlation_matrix, eigh_symmetric, pca_fit, pca_transform, select_features, Averaging,
    Criterion, ReductionError,
};
use proptest::prelude::*;

#[test]
fn hand_matrix_matches_brute_force_pearson() {
    let rows = vec![
        vec![1.0, 2.0, 3.0, 4.0, 5.0],
        vec![2.0, 1.0, 4.0, 3.0, 6.0],
        vec![9.0, 7.0, 4.0, 4.5, 1.0],
    ];
    assert!(correlation_error(&rows) < 1e-12);
}

#[test]
fn random_matrices_match_brute_force_pearson() {
    for seed in 0..5 {
        assert!(correlation_error(&random_rows(7, 60, seed)) < 1e-12, "seed {seed}");
    }
}

#[test]
fn self_and_negated_pairs() {
    let a: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
    let neg: Vec<f64> = a.iter().map(|v| -v).collect();
    let stats = correlation_matrix(&design(&[a.clone(), a, neg])).unwrap();
    assert!((stats.matrix[(0, 1)] - 1.0).abs() < 1e-12);
    assert!((stats.matrix[(0, 2)] + 1.0).abs() < 1e-12);
}

#[test]
fn constant_feature_is_flagged_and_zeroed() {
    let rows = vec![vec![3.0; 6], vec![1.0, 2.0, 0.0, 5.0, 4.0, 3.0]];
    let stats = correlation_matrix(&design(&rows)).unwrap();
    assert!(stats.degenerate[0] && !stats.degenerate[1]);
    assert_eq!(stats.matrix[(0, 1)], 0.0);
    assert_eq!(stats.matrix[(0, 0)], 1.0);
    assert!(correlation_error(&rows) < 1e-12);
}

#[test]
fn absolute_averaging_uses_magnitudes() {
    let rows = random_rows(5, 30, 4);
    let stats = correlation_matrix(&design(&rows)).unwrap().with_averaging(Averaging::Absolute);
    let c = pearson_oracle(&rows);
    for i in 0..5 {
        let want = c[i].iter().map(|v| v.abs()).sum::<f64>() / 5.0;
        assert!((stats.averages[i] - want).abs() < 1e-12);
    }
}

#[test]
fn selection_copies_rows_by_index() {
    let rows = random_rows(6, 10, 9);
    let x = design(&rows);
    let stats = correlation_matrix(&x).unwrap();
    let m = select_features(&stats, Criterion::TopK(3)).unwrap();
    let out = apply_selection(&m, &x).unwrap();
    let mut idx = m.selected.clone();
    idx.sort_unstable();
    for (r, &i) in idx.iter().enumerate() {
        assert_eq!(out.values.row(r), rows[i].as_slice());
        assert_eq!(out.feature_names[r], format!("f{i}"));
    }
}

#[test]
fn full_selection_is_identity_and_idempotent() {
    let x = design(&random_rows(5, 12, 2));
    let stats = correlation_matrix(&x).unwrap();
    let m = select_features(&stats, Criterion::TopK(5)).unwrap();
    let once = apply_selection(&m, &x).unwrap();
    assert_eq!(once, x);
    assert_eq!(apply_selection(&m, &once).unwrap(), x);
}

#[test]
fn selection_rejects_other_dimensions() {
    let x = design(&random_rows(4, 8, 1));
    let m = select_features(&correlation_matrix(&x).unwrap(), Criterion::TopK(2)).unwrap();
    let other = design(&random_rows(3, 8, 1));
    assert_eq!(
        apply_selection(&m, &other).unwrap_err(),
        ReductionError::DimensionMismatch { expected: 4, found: 3 }
    );
}

#[test]
fn eigen_small_cases() {
    let e = eigh_symmetric(&Matrix::identity(3)).unwrap();
    assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    let d = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 4.0, 0.0], vec![0.0, 0.0, 0.0]]);
    let e = eigh_symmetric(&d).unwrap();
    assert_eq!(e.values, vec![4.0, 1.0, 0.0]);
    assert_eq!(e.vector(0), vec![0.0, 1.0, 0.0]);
    assert_eq!(e.vector(1), vec![1.0, 0.0, 0.0]);
}

#[test]
fn eigen_random_8x8_against_power_iteration() {
    for seed in 0..4 {
        let c = eigen_check(8, seed);
        assert!(c.reconstruction < 1e-8, "seed {seed}: {}", c.reconstruction);
        assert!(c.residual < 1e-8);
        assert!(c.orthonormality < 1e-10);
        assert!(c.top_value < 1e-8, "seed {seed}: {}", c.top_value);
        assert!(c.top_vector < 1e-8, "seed {seed}: {}", c.top_vector);
        assert!(c.trace < 1e-10);
    }
}

#[test]
fn eigen_sign_convention() {
    for seed in 0..3 {
        let e = eigh_symmetric(&random_symmetric(6, seed)).unwrap();
        for i in 0..6 {
            let v = e.vector(i);
            let big = v.iter().cloned().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            assert!(big > 0.0);
        }
    }
}

#[test]
fn pca_matches_full_decomposition_oracle() {
    let c = pca_check(5, 50, 2, 17);
    assert!(c.eigenvalues < 1e-8, "{}", c.eigenvalues);
    assert!(c.angle < 1e-6, "{}", c.angle);
    assert!(c.total_variance < 1e-8);
    assert!(c.transform < 1e-12);
}

#[test]
fn pca_transform_matches_naive_matmul_on_fixture() {
    let (train, _) = fixture_design(true);
    // four informative fixture columns, first 20 samples
    let pick = ["sbytes", "dbytes", "spkts", "dur"];
    let rows: Vec<Vec<f64>> = pick
        .iter()
        .map(|n| {
            let i = train.feature_names.iter().position(|f| f == n).unwrap();
            train.values.row(i)[..20].to_vec()
        })
        .collect();
    let x = design(&rows);
    let m = pca_fit(&x, 2).unwrap();
    let u = pca_transform(&m, &x).unwrap();
    let naive = naive_projection(&m.projection, &m.mean, &rows);
    for c in 0..2 {
        for t in 0..20 {
            assert!((u.values[(c, t)] - naive[c][t]).abs() < 1e-12);
        }
    }
    assert_eq!(u.feature_names, vec!["pc_1", "pc_2"]);
}

#[test]
fn full_rank_pca_is_an_isometry() {
    let rows = random_rows(4, 15, 3);
    let x = design(&rows);
    let m = pca_fit(&x, 4).unwrap();
    let u = pca_transform(&m, &x).unwrap();
    let dist = |v: &Matrix, a: usize, b: usize| {
        (0..v.rows()).map(|r| (v[(r, a)] - v[(r, b)]).powi(2)).sum::<f64>().sqrt()
    };
    for a in 0..15 {
        for b in 0..15 {
            assert!((dist(&x.values, a, b) - dist(&u.values, a, b)).abs() < 1e-8);
        }
    }
    for t in 0..15 {
        let col: Vec<f64> = (0..4).map(|r| u.values[(r, t)]).collect();
        let back = m.reconstruct(&col);
        for d in 0..4 {
            assert!((back[d] - rows[d][t]).abs() < 1e-8);
        }
    }
}

#[test]
fn rank_deficient_pca_still_fits() {
    let x1: Vec<f64> = (0..6).map(|i| i as f64).collect();
    let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
    let m = pca_fit(&design(&[x1, x2]), 2).unwrap();
    assert!(m.rank_deficient);
    let s5 = 5f64.sqrt();
    assert!((m.projection[(0, 0)] - 1.0 / s5).abs() < 1e-12);
    assert!((m.projection[(1, 0)] - 2.0 / s5).abs() < 1e-12);
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..6, 3usize..25).prop_flat_map(|(d, n)| {
        proptest::collection::vec(proptest::collection::vec(-100.0f64..100.0, n), d)
    })
}

fn dm(rows: &[Vec<f64>]) -> DesignMatrix {
    design(rows)
}

proptest! {
    #![proptest_config(pt_config(64))]

    #[test]
    fn correlation_is_invariant_under_positive_affine_scaling(
        rows in rows_strategy(),
        scale in proptest::collection::vec(0.01f64..50.0, 6),
        shift in proptest::collection::vec(-1e3f64..1e3, 6),
    ) {
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|v| scale[i] * v + shift[i]).collect())
            .collect();
        let a = correlation_matrix(&dm(&rows)).unwrap();
        let b = correlation_matrix(&dm(&scaled)).unwrap();
        // near-constant rows can flip the degenerate flag under rounding
        prop_assume!(a.degenerate == b.degenerate);
        prop_assert!(a.matrix.max_abs_diff(&b.matrix) < 1e-10);
        let d = rows.len();
        let ka = select_features(&a, Criterion::TopK(d)).unwrap();
        let kb = select_features(&b, Criterion::TopK(d)).unwrap();
        let gap = a.averages.iter().zip(&a.averages[1..]).map(|(x, y)| (x - y).abs()).fold(f64::INFINITY, f64::min);
        if gap > 1e-9 {
            prop_assert_eq!(ka.selected, kb.selected);
        }
    }

    #[test]
    fn ranking_ignores_the_diagonal(rows in rows_strategy()) {
        let stats = correlation_matrix(&dm(&rows)).unwrap();
        let d = rows.len();
        let c = pearson_oracle(&rows);
        // averages recomputed with the diagonal set to 0
        let without: Vec<f64> = (0..d)
            .map(|i| (0..d).filter(|&j| j != i).map(|j| c[i][j]).sum::<f64>() / d as f64)
            .collect();
        for i in 0..d {
            prop_assert!((stats.averages[i] - without[i] - 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn pca_eigenvalues_sum_to_trace(rows in rows_strategy()) {
        let d = rows.len();
        let m = pca_fit(&dm(&rows), d).unwrap();
        let trace: f64 = (0..d).map(|i| covariance_oracle(&rows)[(i, i)]).sum();
        prop_assert!((m.eigenvalues.iter().sum::<f64>() - trace).abs() < 1e-8 * trace.max(1.0));
        prop_assert!(m.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pca_transform_is_affine(
        rows in rows_strategy(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let x = dm(&rows);
        let k = rows.len().min(2);
        let m = pca_fit(&x, k).unwrap();
        let other = random_rows(rows.len(), rows[0].len(), seed);
        // z = a·x1 + b·x2 − (a + b − 1)·mean, so that z − mean = a(x1 − mean) + b(x2 − mean)
        let mixed: Vec<Vec<f64>> = (0..rows.len())
            .map(|i| {
                (0..rows[0].len())
                    .map(|t| a * rows[i][t] + b * other[i][t] - (a + b - 1.0) * m.mean[i])
                    .collect()
            })
            .collect();
        let u1 = pca_transform(&m, &x).unwrap();
        let u2 = pca_transform(&m, &dm(&other)).unwrap();
        let uz = pca_transform(&m, &dm(&mixed)).unwrap();
        for c in 0..k {
            for t in 0..rows[0].len() {
                let want = a * u1.values[(c, t)] + b * u2.values[(c, t)];
                prop_assert!((uz.values[(c, t)] - want).abs() < 1e-8 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn threshold_and_top_k_agree(rows in rows_strategy(), k in 1usize..6) {
        let stats = correlation_matrix(&dm(&rows)).unwrap();
        let d = rows.len();
        let k = k.min(d);
        let top = select_features(&stats, Criterion::TopK(k)).unwrap();
        let mut sorted = stats.averages.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if k < d && sorted[k - 1] - sorted[k] > 1e-9 {
            let t = 0.5 * (sorted[k - 1] + sorted[k]);
            let thr = select_features(&stats, Criterion::Threshold(t)).unwrap();
            prop_assert_eq!(thr.selected, top.selected);
        }
    }
}
