//! Confusion-matrix metrics and the training/inference timing decomposition.

mod report;

pub use report::{EvalReport, RunLabel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("y_true has {0} labels, y_pred has {1}")]
    LengthMismatch(usize, usize),
    #[error("label {0} is not among the evaluated classes")]
    UnknownLabel(usize),
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<usize>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.n_classes()).map(|c| self.counts[c][c]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.diagonal() as f64 / total as f64
    }
}

pub fn confusion(
    y_true: &[usize],
    y_pred: &[usize],
    classes: &[usize],
) -> Result<ConfusionMatrix, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    let pos = |l: usize| {
        classes
            .iter()
            .position(|&c| c == l)
            .ok_or(MetricsError::UnknownLabel(l))
    };
    let mut counts = vec![vec![0u64; classes.len()]; classes.len()];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        counts[pos(t)?][pos(p)?] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Per-class values weighted by true-class support.
    #[default]
    Weighted,
    Macro,
}

impl std::str::FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weighted" => Ok(Averaging::Weighted),
            "macro" => Ok(Averaging::Macro),
            other => Err(format!("unknown averaging `{other}` (expected weighted|macro)")),
        }
    }
}

/// Precision, recall and F1 as percentages at full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Harmonic mean `2PR / (P + R)`; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Averages per-class precision and recall, then derives F1 from the two
/// averages. Classes never predicted get precision 0.
pub fn aggregate_prf(cm: &ConfusionMatrix, averaging: Averaging) -> Prf {
    let c = cm.n_classes();
    let total = cm.total() as f64;
    let mut p_sum = 0.0;
    let mut r_sum = 0.0;
    for k in 0..c {
        let tp = cm.counts[k][k] as f64;
        let col = cm.col_sum(k) as f64;
        let row = cm.row_sum(k) as f64;
        let p = if col > 0.0 { tp / col } else { 0.0 };
        let r = if row > 0.0 { tp / row } else { 0.0 };
        let w = match averaging {
            Averaging::Weighted => row / total,
            Averaging::Macro => 1.0 / c as f64,
        };
        p_sum += w * p;
        r_sum += w * r;
    }
    let precision = 100.0 * p_sum;
    let recall = 100.0 * r_sum;
    Prf {
        precision,
        recall,
        f1: f1_score(precision, recall),
    }
}

/// Recall of each true class in percent; `None` for classes with no samples.
pub fn per_class_accuracy(cm: &ConfusionMatrix) -> Vec<Option<f64>> {
    (0..cm.n_classes())
        .map(|k| {
            let row = cm.row_sum(k);
            (row > 0).then(|| 100.0 * cm.counts[k][k] as f64 / row as f64)
        })
        .collect()
}

/// Timing components in seconds, plus the two derived totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub fit_model: f64,
    pub fit_reducer: f64,
    pub predict_model: f64,
    pub transform_reducer: f64,
    pub n_test: usize,
    /// Seconds.
    pub training_time: f64,
    /// Microseconds per test sample.
    pub inference_time_per_sample: f64,
}

/// Training time is model fit plus reducer fit; inference time is model
/// prediction plus reducer transform, spread over the test samples.
/// Preprocessing is not part of either.
pub fn compose_timing(
    fit_reducer: f64,
    fit_model: f64,
    transform_reducer: f64,
    predict_model: f64,
    n_test: usize,
) -> Timing {
    debug_assert!(n_test >= 1);
    Timing {
        fit_model,
        fit_reducer,
        predict_model,
        transform_reducer,
        n_test,
        training_time: fit_model + fit_reducer,
        inference_time_per_sample: (predict_model + transform_reducer) / n_test as f64 * 1e6,
    }
}

/// Rounds to 2 decimals, the precision tables are emitted with.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}
