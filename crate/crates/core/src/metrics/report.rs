use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{aggregate_prf, confusion, per_class_accuracy, Averaging, ConfusionMatrix, MetricsError, Timing};
use crate::classifiers::ClassifierKind;
use crate::dataset::Task;
use crate::reduction::Method;

/// Identifies one cell of the experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLabel {
    pub task: Task,
    pub method: Method,
    /// Dimensionality the classifier saw.
    pub k: usize,
    pub classifier: ClassifierKind,
}

/// Everything measured for one run. Metric values are kept at full precision
/// and rounded only when tables are rendered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: RunLabel,
    pub averaging: Averaging,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub class_names: Vec<String>,
    /// Percent; `None` where the test set has no sample of that class.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub confusion: ConfusionMatrix,
    pub timing: Timing,
    /// Samples per predict call. The whole test set goes through one call, so
    /// the per-sample inference time is that call's duration over `n_test`.
    pub predict_batch_size: usize,
    /// Names of the features or components fed to the classifier.
    pub reduced_features: Vec<String>,
    /// Hex SHA-256 over the resolved config and the dataset checksums.
    pub fingerprint: String,
    pub config: BTreeMap<String, String>,
    pub dataset_checksums: BTreeMap<String, String>,
}

impl EvalReport {
    pub fn from_predictions(
        label: RunLabel,
        y_true: &[usize],
        y_pred: &[usize],
        averaging: Averaging,
        timing: Timing,
    ) -> Result<Self, MetricsError> {
        let classes = label.task.classes();
        let cm = confusion(y_true, y_pred, &classes)?;
        let prf = aggregate_prf(&cm, averaging);
        Ok(Self {
            class_names: label.task.class_names().iter().map(|s| s.to_string()).collect(),
            per_class_accuracy: per_class_accuracy(&cm),
            label,
            averaging,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            confusion: cm,
            timing,
            predict_batch_size: y_true.len(),
            reduced_features: Vec::new(),
            fingerprint: String::new(),
            config: BTreeMap::new(),
            dataset_checksums: BTreeMap::new(),
        })
    }

    /// True when every metric field (not timings or provenance) matches
    /// bit for bit.
    pub fn same_metrics(&self, other: &EvalReport) -> bool {
        self.label == other.label
            && self.precision.to_bits() == other.precision.to_bits()
            && self.recall.to_bits() == other.recall.to_bits()
            && self.f1.to_bits() == other.f1.to_bits()
            && self.confusion == other.confusion
            && self.per_class_accuracy.len() == other.per_class_accuracy.len()
            && self
                .per_class_accuracy
                .iter()
                .zip(&other.per_class_accuracy)
                .all(|(a, b)| a.map(f64::to_bits) == b.map(f64::to_bits))
    }
}
