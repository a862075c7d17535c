use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::dataset::DesignMatrix;
use crate::matrix::{compensated_sum, CompensatedSum, Matrix};

/// How per-feature average correlation is formed from the coefficient rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Plain mean of the signed coefficients.
    #[default]
    Signed,
    /// Mean of `|c_ij|`.
    Absolute,
}

/// Pairwise Pearson coefficients over the training samples plus the per-feature
/// average correlation (diagonal included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStats {
    pub matrix: Matrix,
    pub averages: Vec<f64>,
    pub feature_names: Vec<String>,
    /// Features with zero variance; their off-diagonal coefficients are 0.
    pub degenerate: Vec<bool>,
    pub averaging: Averaging,
}

impl CorrelationStats {
    /// Same coefficients, averages recomputed with `averaging`.
    pub fn with_averaging(&self, averaging: Averaging) -> CorrelationStats {
        CorrelationStats {
            averages: row_averages(&self.matrix, averaging),
            averaging,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }
}

fn row_averages(matrix: &Matrix, averaging: Averaging) -> Vec<f64> {
    let d = matrix.rows() as f64;
    (0..matrix.rows())
        .map(|i| {
            let row = matrix.row(i).iter();
            match averaging {
                Averaging::Signed => compensated_sum(row.copied()) / d,
                Averaging::Absolute => compensated_sum(row.map(|v| v.abs())) / d,
            }
        })
        .collect()
}

const BLOCK: usize = 512;

/// Row means and the matrix of centered cross products
/// `S_ij = Σ_n (x_in - m_i)(x_jn - m_j)`.
///
/// Sums run in blocks whose partial results feed a compensated accumulator.
/// Entries are computed independently so the result does not depend on the
/// thread count.
pub(crate) fn centered_cross_products(values: &Matrix) -> (Vec<f64>, Matrix) {
    let d = values.rows();
    let n = values.cols() as f64;
    let means: Vec<f64> = (0..d)
        .into_par_iter()
        .map(|i| compensated_sum(values.row(i).iter().copied()) / n)
        .collect();

    let upper: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| {
            let xi = values.row(i);
            let mi = means[i];
            (i..d)
                .map(|j| {
                    let xj = values.row(j);
                    let mj = means[j];
                    let mut acc = CompensatedSum::default();
                    for (bi, bj) in xi.chunks(BLOCK).zip(xj.chunks(BLOCK)) {
                        let partial: f64 = bi
                            .iter()
                            .zip(bj)
                            .map(|(&a, &b)| (a - mi) * (b - mj))
                            .sum();
                        acc.add(partial);
                    }
                    acc.value()
                })
                .collect()
        })
        .collect();

    let mut cross = Matrix::zeros(d, d);
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            cross[(i, j)] = v;
            cross[(j, i)] = v;
        }
    }
    (means, cross)
}

/// Pearson correlation matrix of the features of `x` with signed per-feature
/// averages.
///
/// A zero-variance feature gets coefficient 0 against every other feature
/// and is flagged in `degenerate`; every diagonal entry is exactly 1.
pub fn correlation_matrix(x: &DesignMatrix) -> Result<CorrelationStats, ReductionError> {
    let n = x.n_samples();
    if n < 2 {
        return Err(ReductionError::NotEnoughSamples(n));
    }
    let d = x.n_features();
    let (_, cross) = centered_cross_products(&x.values);
    let degenerate: Vec<bool> = (0..d).map(|i| cross[(i, i)] <= 0.0).collect();
    let mut matrix = Matrix::identity(d);
    for i in 0..d {
        for j in (i + 1)..d {
            let c = if degenerate[i] || degenerate[j] {
                0.0
            } else {
                let denom = cross[(i, i)].sqrt() * cross[(j, j)].sqrt();
                (cross[(i, j)] / denom).clamp(-1.0, 1.0)
            };
            matrix[(i, j)] = c;
            matrix[(j, i)] = c;
        }
    }
    let averages = row_averages(&matrix, Averaging::Signed);
    Ok(CorrelationStats {
        matrix,
        averages,
        feature_names: x.feature_names.clone(),
        degenerate,
        averaging: Averaging::Signed,
    })
}
