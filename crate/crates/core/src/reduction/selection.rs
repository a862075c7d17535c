use serde::{Deserialize, Serialize};

use super::{check_features, CorrelationStats, ReductionError};
use crate::dataset::DesignMatrix;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Keep every feature whose average correlation is strictly above the
    /// threshold. Features tied with a kept feature are kept as well.
    Threshold(f64),
    /// Keep the `k` highest averages; ties broken by feature name.
    TopK(usize),
}

/// Fitted correlation-based selection.
///
/// `selected` is ranked by descending average correlation, then ascending
/// feature name. [`apply_selection`] emits rows in original feature order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionModel {
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    /// Average correlation of each selected feature, same order as `selected`.
    pub scores: Vec<f64>,
    pub threshold: Option<f64>,
    pub k: usize,
    pub input_names: Vec<String>,
}

impl SelectionModel {
    /// Selected indices in ascending order, the row order of the transform.
    pub fn gather_order(&self) -> Vec<usize> {
        let mut idx = self.selected.clone();
        idx.sort_unstable();
        idx
    }
}

/// Ranks features by average correlation and keeps those the criterion admits.
pub fn select_features(
    stats: &CorrelationStats,
    criterion: Criterion,
) -> Result<SelectionModel, ReductionError> {
    let d = stats.dim();
    let mut ranked: Vec<usize> = (0..d).collect();
    ranked.sort_by(|&a, &b| {
        stats.averages[b]
            .total_cmp(&stats.averages[a])
            .then_with(|| stats.feature_names[a].cmp(&stats.feature_names[b]))
    });

    let (keep, threshold) = match criterion {
        Criterion::Threshold(t) => {
            if !t.is_finite() {
                return Err(ReductionError::InvalidCriterion(format!("threshold {t} is not finite")));
            }
            let keep = ranked.iter().take_while(|&&i| stats.averages[i] > t).count();
            if keep == 0 {
                return Err(ReductionError::EmptySelection(t));
            }
            (keep, Some(t))
        }
        Criterion::TopK(k) => {
            if k == 0 || k > d {
                return Err(ReductionError::InvalidCriterion(format!(
                    "top_k = {k} outside 1..={d}"
                )));
            }
            (k, None)
        }
    };
    ranked.truncate(keep);
    Ok(SelectionModel {
        selected_names: ranked.iter().map(|&i| stats.feature_names[i].clone()).collect(),
        scores: ranked.iter().map(|&i| stats.averages[i]).collect(),
        selected: ranked,
        threshold,
        k: keep,
        input_names: stats.feature_names.clone(),
    })
}

/// Picks the selected feature rows out of `x`. No arithmetic on values.
pub fn apply_selection(
    model: &SelectionModel,
    x: &DesignMatrix,
) -> Result<DesignMatrix, ReductionError> {
    check_features(&model.input_names, x)?;
    let order = model.gather_order();
    let n = x.n_samples();
    let mut data = Vec::with_capacity(order.len() * n);
    for &i in &order {
        data.extend_from_slice(x.values.row(i));
    }
    let names = order.iter().map(|&i| x.feature_names[i].clone()).collect();
    Ok(x.with_values(Matrix::from_row_major(order.len(), n, data), names))
}
