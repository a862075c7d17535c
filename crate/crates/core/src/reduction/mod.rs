//! Dimensionality reduction: correlation-ranked feature selection and PCA
//! feature extraction, both fitted on training data and applied to any
//! design matrix with the same features.

mod correlation;
mod eigen;
mod pca;
mod selection;

pub use correlation::{correlation_matrix, Averaging, CorrelationStats};
pub use eigen::{eigh_symmetric, SymmetricEigen, JACOBI_MAX_SWEEPS};
pub use pca::{pca_fit, pca_transform, ExtractionModel};
pub use selection::{apply_selection, select_features, Criterion, SelectionModel};

pub(crate) use correlation::centered_cross_products;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DesignMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("need at least 2 samples, got {0}")]
    NotEnoughSamples(usize),
    #[error("invalid selection criterion: {0}")]
    InvalidCriterion(String),
    #[error("threshold {0} excludes every feature")]
    EmptySelection(f64),
    #[error("input has {found} features, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature names differ from those the model was fitted on")]
    FeatureMismatch,
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:e})")]
    NotSymmetric(f64),
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("k = {k} is outside 1..={d}")]
    InvalidK { k: usize, d: usize },
}

/// A fitted reducer mapping D features to K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reducer {
    /// Pass-through; keeps the fitted feature list for dimension checks.
    Identity { feature_names: Vec<String> },
    Selection(SelectionModel),
    Extraction(ExtractionModel),
}

impl Reducer {
    pub fn transform(&self, x: &DesignMatrix) -> Result<DesignMatrix, ReductionError> {
        match self {
            Reducer::Identity { feature_names } => {
                if x.n_features() != feature_names.len() {
                    return Err(ReductionError::DimensionMismatch {
                        expected: feature_names.len(),
                        found: x.n_features(),
                    });
                }
                if &x.feature_names != feature_names {
                    return Err(ReductionError::FeatureMismatch);
                }
                Ok(x.clone())
            }
            Reducer::Selection(m) => apply_selection(m, x),
            Reducer::Extraction(m) => pca_transform(m, x),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Reducer::Identity { feature_names } => feature_names.len(),
            Reducer::Selection(m) => m.k,
            Reducer::Extraction(m) => m.k(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Reducer::Identity { feature_names } => feature_names.len(),
            Reducer::Selection(m) => m.input_names.len(),
            Reducer::Extraction(m) => m.input_names.len(),
        }
    }
}

pub(crate) fn check_features(
    expected: &[String],
    x: &DesignMatrix,
) -> Result<(), ReductionError> {
    if x.n_features() != expected.len() {
        return Err(ReductionError::DimensionMismatch {
            expected: expected.len(),
            found: x.n_features(),
        });
    }
    if x.feature_names != expected {
        return Err(ReductionError::FeatureMismatch);
    }
    Ok(())
}

/// Which reduction family a run used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    None,
    Selection,
    Extraction,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Selection => "selection",
            Method::Extraction => "extraction",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Method::None => "No Reduction",
            Method::Selection => "Feature Selection",
            Method::Extraction => "Feature Extraction",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
