//! Independent oracles shared by the integration tests and the acceptance
//! harness. Everything here is written from the textbook definitions with
//! plain loops and no code from the library's numerical kernels.

#![allow(dead_code)]

use std::path::PathBuf;

use nidsbench_core::classifiers::mlp::Mlp;
use nidsbench_core::classifiers::tree::best_split;
use nidsbench_core::classifiers::Samples;
use nidsbench_core::dataset::{apply_encoder, fit_encoder, load_csv, DesignMatrix, FeatureTable, Schema};
use nidsbench_core::matrix::Matrix;
use nidsbench_core::metrics::{aggregate_prf, confusion, f1_score, round2, Averaging};
use nidsbench_core::reduction::{correlation_matrix, eigh_symmetric, pca_fit, pca_transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_tables() -> (FeatureTable, FeatureTable) {
    let schema = Schema::unsw_nb15();
    (
        load_csv(fixture("unsw_train.csv"), &schema).unwrap(),
        load_csv(fixture("unsw_test.csv"), &schema).unwrap(),
    )
}

/// Encoded fixture train/test pair.
pub fn fixture_design(minmax: bool) -> (DesignMatrix, DesignMatrix) {
    let (train, test) = fixture_tables();
    let spec = fit_encoder(&train, minmax).unwrap();
    (apply_encoder(&spec, &train).unwrap(), apply_encoder(&spec, &test).unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..d)
        .map(|i| (0..n).map(|_| r.random_range(-1.0..1.0) * (i + 1) as f64).collect())
        .collect()
}

pub fn design(rows: &[Vec<f64>]) -> DesignMatrix {
    let names = (0..rows.len()).map(|i| format!("f{i}")).collect();
    DesignMatrix::unlabeled(Matrix::from_rows(rows), names)
}

/// Pearson coefficient straight from the definition; 0 for constant rows,
/// 1 on the diagonal.
pub fn pearson_oracle(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = rows.len();
    let n = rows[0].len() as f64;
    let means: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / n).collect();
    let mut c = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                c[i][j] = 1.0;
                continue;
            }
            let mut sxy = 0.0;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            for t in 0..rows[i].len() {
                let a = rows[i][t] - means[i];
                let b = rows[j][t] - means[j];
                sxy += a * b;
                sxx += a * a;
                syy += b * b;
            }
            c[i][j] = if sxx == 0.0 || syy == 0.0 { 0.0 } else { sxy / (sxx * syy).sqrt() };
        }
    }
    c
}

/// Mean of each coefficient row, diagonal included.
pub fn average_oracle(c: &[Vec<f64>]) -> Vec<f64> {
    c.iter().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect()
}

/// Largest deviation of the library's correlation matrix and averages from
/// the oracle.
pub fn correlation_error(rows: &[Vec<f64>]) -> f64 {
    let stats = correlation_matrix(&design(rows)).unwrap();
    let c = pearson_oracle(rows);
    let avg = average_oracle(&c);
    let mut err: f64 = 0.0;
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            err = err.max((stats.matrix[(i, j)] - c[i][j]).abs());
        }
        err = err.max((stats.averages[i] - avg[i]).abs());
    }
    err
}

pub fn random_symmetric(n: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = r.random_range(-1.0..1.0);
            a.as_mut_slice()[i * n + j] = v;
            a.as_mut_slice()[j * n + i] = v;
        }
    }
    a
}

fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)] * v[j]).sum())
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Algebraically largest eigenpair by power iteration on `A + sI`, with `s`
/// large enough to make every eigenvalue positive.
pub fn power_iteration(a: &Matrix, iters: usize) -> (f64, Vec<f64>) {
    let n = a.rows();
    let shift = a.frobenius_norm();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    for _ in 0..iters {
        let mut w = mat_vec(a, &v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        let nw = norm(&w);
        v = w.into_iter().map(|x| x / nw).collect();
    }
    let av = mat_vec(a, &v);
    let lambda = v.iter().zip(&av).map(|(x, y)| x * y).sum();
    (lambda, v)
}

pub struct EigenCheck {
    pub reconstruction: f64,
    pub residual: f64,
    pub orthonormality: f64,
    pub top_value: f64,
    pub top_vector: f64,
    pub trace: f64,
}

pub fn eigen_check(n: usize, seed: u64) -> EigenCheck {
    let a = random_symmetric(n, seed);
    let e = eigh_symmetric(&a).unwrap();
    let scale = a.frobenius_norm();
    let reconstruction = e.reconstruct().max_abs_diff(&a);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let v = e.vector(i);
        let av = mat_vec(&a, &v);
        for (x, y) in av.iter().zip(&v) {
            residual = residual.max((x - e.values[i] * y).abs() / scale);
        }
    }
    let vtv = e.vectors.transpose().matmul(&e.vectors);
    let orthonormality = vtv.max_abs_diff(&Matrix::identity(n));
    let (lambda, pv) = power_iteration(&a, 20_000);
    let top = e.vector(0);
    let dot: f64 = top.iter().zip(&pv).map(|(x, y)| x * y).sum();
    let trace_a: f64 = (0..n).map(|i| a[(i, i)]).sum();
    EigenCheck {
        reconstruction,
        residual,
        orthonormality,
        top_value: (lambda - e.values[0]).abs(),
        top_vector: 1.0 - dot.abs(),
        trace: (trace_a - e.values.iter().sum::<f64>()).abs(),
    }
}

/// Covariance with the 1/N normalization, from nested loops.
pub fn covariance_oracle(rows: &[Vec<f64>]) -> Matrix {
    let d = rows.len();
    let n = rows[0].len();
    let means: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    Matrix::from_fn(d, d, |i, j| {
        (0..n)
            .map(|t| (rows[i][t] - means[i]) * (rows[j][t] - means[j]))
            .sum::<f64>()
            / n as f64
    })
}

/// `‖AAᵀ − BBᵀ‖_F / √2` for orthonormal D×K bases. This equals
/// `sqrt(Σ sin²θ_i)` over the principal angles, so it bounds the sine of the
/// largest one.
pub fn subspace_distance(a: &Matrix, b: &Matrix) -> f64 {
    let pa = a.matmul(&a.transpose());
    let pb = b.matmul(&b.transpose());
    let sq: f64 = pa.as_slice().iter().zip(pb.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq / 2.0).sqrt()
}

/// Top-k eigenpairs of a symmetric PSD matrix by power iteration with
/// deflation.
pub fn deflated_power(a: &Matrix, k: usize, iters: usize) -> (Vec<f64>, Matrix) {
    let d = a.rows();
    let mut work = a.clone();
    let mut values = Vec::new();
    let mut vecs = Matrix::zeros(d, k);
    for c in 0..k {
        let (lambda, v) = power_iteration(&work, iters);
        for i in 0..d {
            vecs.as_mut_slice()[i * k + c] = v[i];
            for j in 0..d {
                work.as_mut_slice()[i * d + j] -= lambda * v[i] * v[j];
            }
        }
        values.push(lambda);
    }
    (values, vecs)
}

pub struct PcaCheck {
    pub eigenvalues: f64,
    /// Sine bound on the largest principal angle.
    pub angle: f64,
    pub total_variance: f64,
    pub transform: f64,
}

pub fn pca_check(d: usize, n: usize, k: usize, seed: u64) -> PcaCheck {
    let rows = random_rows(d, n, seed);
    let x = design(&rows);
    let m = pca_fit(&x, k).unwrap();
    let r = covariance_oracle(&rows);
    let (values, vecs) = deflated_power(&r, k, 200_000);
    let eigenvalues = values
        .iter()
        .zip(&m.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let angle = subspace_distance(&m.projection, &vecs);
    let trace: f64 = (0..d).map(|i| r[(i, i)]).sum();
    let all = pca_fit(&x, d).unwrap();
    let total_variance = (all.eigenvalues.iter().sum::<f64>() - trace).abs().max((m.total_variance - trace).abs());

    let u = pca_transform(&m, &x).unwrap();
    let naive = naive_projection(&m.projection, &m.mean, &rows);
    let mut transform: f64 = 0.0;
    for c in 0..k {
        for t in 0..n {
            transform = transform.max((u.values[(c, t)] - naive[c][t]).abs());
        }
    }
    PcaCheck {
        eigenvalues,
        angle,
        total_variance,
        transform,
    }
}

/// `u[c][t] = Σ_d W[d][c] · (x[d][t] − mean[d])` by triple loop.
pub fn naive_projection(w: &Matrix, mean: &[f64], rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (d, k) = (w.rows(), w.cols());
    let n = rows[0].len();
    let mut u = vec![vec![0.0; n]; k];
    for c in 0..k {
        for t in 0..n {
            let mut s = 0.0;
            for i in 0..d {
                s += w[(i, c)] * (rows[i][t] - mean[i]);
            }
            u[c][t] = s;
        }
    }
    u
}

/// Gini of a label multiset, from the definition.
fn gini_of(labels: &[usize], n_classes: usize) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let n = labels.len() as f64;
    1.0 - (0..n_classes)
        .map(|c| {
            let p = labels.iter().filter(|&&l| l == c).count() as f64 / n;
            p * p
        })
        .sum::<f64>()
}

/// Best (feature, threshold, impurity decrease) by trying every midpoint of
/// every feature. Ties within 1e-12 keep the earliest candidate, which is the
/// lowest feature and then the lowest threshold.
pub fn exhaustive_split(rows: &[Vec<f64>], y: &[usize], n_classes: usize) -> Option<(usize, f64, f64)> {
    let n = y.len();
    let parent = gini_of(y, n_classes);
    let mut best: Option<(usize, f64, f64)> = None;
    for (f, col) in rows.iter().enumerate() {
        let mut vals = col.clone();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let mut t = (w[0] + w[1]) / 2.0;
            if t >= w[1] {
                t = w[0];
            }
            let left: Vec<usize> = (0..n).filter(|&i| col[i] <= t).map(|i| y[i]).collect();
            let right: Vec<usize> = (0..n).filter(|&i| col[i] > t).map(|i| y[i]).collect();
            let child = (left.len() as f64 * gini_of(&left, n_classes)
                + right.len() as f64 * gini_of(&right, n_classes))
                / n as f64;
            let gain = parent - child;
            if best.is_none_or(|(_, _, g)| gain > g + 1e-12) {
                best = Some((f, t, gain));
            }
        }
    }
    best
}

/// Compares the library split search with the exhaustive oracle. Returns an
/// error description on mismatch.
pub fn split_matches_oracle(rows: &[Vec<f64>], y: &[usize], n_classes: usize) -> Result<(), String> {
    let d = rows.len();
    let n = y.len();
    let mut flat = Vec::with_capacity(n * d);
    for t in 0..n {
        for r in rows {
            flat.push(r[t]);
        }
    }
    let x = Samples::new(&flat, n, d);
    let idx: Vec<usize> = (0..n).collect();
    let features: Vec<usize> = (0..d).collect();
    let got = best_split(x, y, n_classes, &idx, &features);
    let want = exhaustive_split(rows, y, n_classes);
    match (got, want) {
        (None, None) => Ok(()),
        (Some(g), Some((f, t, gain)))
            if g.feature == f && g.threshold == t && (g.impurity_decrease - gain).abs() < 1e-12 =>
        {
            Ok(())
        }
        (g, w) => Err(format!("library {g:?} vs oracle {w:?}")),
    }
}

/// Worst relative error between backprop and central differences on a
/// small network with random parameters.
pub fn mlp_gradient_error(n_in: usize, n_hidden: usize, n_out: usize, batch: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut m = Mlp::init(n_in, n_hidden, n_out, &mut r);
    let x: Vec<f64> = (0..batch * n_in).map(|_| r.random_range(-2.0..2.0)).collect();
    let y: Vec<usize> = (0..batch).map(|_| r.random_range(0..n_out)).collect();
    let s = Samples::new(&x, batch, n_in);
    let alpha = 1e-2;
    let mut grad = vec![0.0; m.params.len()];
    m.loss_and_gradient(s, &y, alpha, &mut grad);
    let mut scratch = vec![0.0; m.params.len()];
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for p in 0..m.params.len() {
        let orig = m.params[p];
        m.params[p] = orig + h;
        let up = m.loss_and_gradient(s, &y, alpha, &mut scratch);
        m.params[p] = orig - h;
        let down = m.loss_and_gradient(s, &y, alpha, &mut scratch);
        m.params[p] = orig;
        let fd = (up - down) / (2.0 * h);
        let denom = grad[p].abs().max(fd.abs()).max(1e-7);
        worst = worst.max((grad[p] - fd).abs() / denom);
    }
    worst
}

/// Counts by nested loops over (true, predicted) class pairs.
pub fn confusion_oracle(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n_classes]; n_classes];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for t in 0..y_true.len() {
                if y_true[t] == i && y_pred[t] == j {
                    *cell += 1;
                }
            }
        }
    }
    m
}

/// Weighted recall minus overall accuracy (both in percent) on random labels.
pub fn weighted_recall_gap(n: usize, n_classes: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let y_true: Vec<usize> = (0..n).map(|_| r.random_range(0..n_classes)).collect();
    let y_pred: Vec<usize> = (0..n).map(|_| r.random_range(0..n_classes)).collect();
    let classes: Vec<usize> = (0..n_classes).collect();
    let cm = confusion(&y_true, &y_pred, &classes).unwrap();
    let acc = 100.0 * y_true.iter().zip(&y_pred).filter(|(a, b)| a == b).count() as f64 / n as f64;
    (aggregate_prf(&cm, Averaging::Weighted).recall - acc).abs()
}

/// The published precision/recall pair and its F1.
pub const F1_TRIPLE: (f64, f64, f64) = (87.87, 87.07, 87.47);

pub fn f1_triple_ok() -> bool {
    let (p, r, f) = F1_TRIPLE;
    let by_hand = 2.0 * p * r / (p + r);
    round2(f1_score(p, r)) == f && (f1_score(p, r) - by_hand).abs() < 1e-12
}

/// Accuracy of always predicting the most frequent training class.
pub fn majority_rate(y_train: &[usize], y_test: &[usize]) -> f64 {
    let n_classes = y_train.iter().max().unwrap() + 1;
    let mut counts = vec![0usize; n_classes];
    for &c in y_train {
        counts[c] += 1;
    }
    let majority = (0..n_classes).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap();
    y_test.iter().filter(|&&c| c == majority).count() as f64 / y_test.len() as f64
}

/// Weighted F1 (percent) of the constant majority-class predictor. Only the
/// majority column is non-empty, so P = q·q and R = q with q its test share.
pub fn majority_f1(y_train: &[usize], y_test: &[usize]) -> f64 {
    let q = majority_rate(y_train, y_test);
    let (p, r) = (100.0 * q * q, 100.0 * q);
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Proptest settings for integration tests (no failure-persistence files).
pub fn pt_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
