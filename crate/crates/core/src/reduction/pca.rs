use serde::{Deserialize, Serialize};

use super::{centered_cross_products, check_features, eigh_symmetric, ReductionError};
use crate::dataset::DesignMatrix;
use crate::matrix::Matrix;

/// Eigenvalues at or below this are treated as a rank deficiency.
pub const RANK_EPS: f64 = 1e-12;

/// Fitted PCA projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionModel {
    /// D × K; column `c` is the `c`-th principal component.
    pub projection: Matrix,
    /// Training mean, length D.
    pub mean: Vec<f64>,
    /// Top-K eigenvalues of the covariance, descending.
    pub eigenvalues: Vec<f64>,
    /// Trace of the covariance (sum of all D eigenvalues).
    pub total_variance: f64,
    pub input_names: Vec<String>,
    /// Set when the K-th eigenvalue is at most [`RANK_EPS`].
    pub rank_deficient: bool,
}

impl ExtractionModel {
    pub fn k(&self) -> usize {
        self.projection.cols()
    }

    pub fn explained_variance_ratio(&self) -> f64 {
        if self.total_variance > 0.0 {
            self.eigenvalues.iter().sum::<f64>() / self.total_variance
        } else {
            0.0
        }
    }

    pub fn component_names(&self) -> Vec<String> {
        (1..=self.k()).map(|c| format!("pc_{c}")).collect()
    }

    /// `W u + mean` for a single K-vector.
    pub fn reconstruct(&self, u: &[f64]) -> Vec<f64> {
        (0..self.mean.len())
            .map(|d| {
                self.mean[d]
                    + self
                        .projection
                        .row(d)
                        .iter()
                        .zip(u)
                        .map(|(w, x)| w * x)
                        .sum::<f64>()
            })
            .collect()
    }
}

/// Fits PCA with the 1/N covariance and keeps the top `k` eigenvectors.
pub fn pca_fit(x: &DesignMatrix, k: usize) -> Result<ExtractionModel, ReductionError> {
    let d = x.n_features();
    let n = x.n_samples();
    if k == 0 || k > d {
        return Err(ReductionError::InvalidK { k, d });
    }
    if n < 2 {
        return Err(ReductionError::NotEnoughSamples(n));
    }
    let (mean, mut cov) = centered_cross_products(&x.values);
    let inv_n = 1.0 / n as f64;
    cov.as_mut_slice().iter_mut().for_each(|v| *v *= inv_n);
    let total_variance: f64 = (0..d).map(|i| cov[(i, i)]).sum();

    let eig = eigh_symmetric(&cov)?;
    let projection = Matrix::from_fn(d, k, |i, j| eig.vectors[(i, j)]);
    let eigenvalues = eig.values[..k].to_vec();
    let rank_deficient = eigenvalues[k - 1] <= RANK_EPS;
    if rank_deficient {
        log::warn!(
            "PCA rank deficiency: eigenvalue {} is {:e} (k = {k}, d = {d})",
            k,
            eigenvalues[k - 1]
        );
    }
    Ok(ExtractionModel {
        projection,
        mean,
        eigenvalues,
        total_variance,
        input_names: x.feature_names.clone(),
        rank_deficient,
    })
}

/// `U = Wᵀ (X - mean)`, K × N, with features renamed `pc_1..pc_K`.
pub fn pca_transform(
    model: &ExtractionModel,
    x: &DesignMatrix,
) -> Result<DesignMatrix, ReductionError> {
    check_features(&model.input_names, x)?;
    let k = model.k();
    let n = x.n_samples();
    let mut u = Matrix::zeros(k, n);
    for (d, &mean) in model.mean.iter().enumerate() {
        let xd = x.values.row(d);
        for c in 0..k {
            let w = model.projection[(d, c)];
            if w == 0.0 {
                continue;
            }
            for (out, &v) in u.row_mut(c).iter_mut().zip(xd) {
                *out += w * (v - mean);
            }
        }
    }
    Ok(x.with_values(u, model.component_names()))
}
