//! Flow-record ingestion: CSV loading, schema validation and the
//! encode/normalize step that turns raw records into a numeric design matrix.

mod encoder;
mod loader;
mod schema;

pub use encoder::{apply_encoder, fit_encoder, EncodedColumn, EncoderSpec};
pub use loader::{load_csv, load_csv_reader};
pub use schema::{ColumnKind, ColumnSpec, Schema, NOMINAL_COLUMNS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

/// The ten traffic classes, in the fixed alphabetical order used for
/// multiclass ids.
pub const CLASS_NAMES: [&str; 10] = [
    "Analysis",
    "Backdoor",
    "DoS",
    "Exploits",
    "Fuzzers",
    "Generic",
    "Normal",
    "Reconnaissance",
    "Shellcode",
    "Worms",
];

pub const BINARY_CLASS_NAMES: [&str; 2] = ["Normal", "Abnormal"];

/// Looks up the class id for an `attack_cat` value. Surrounding whitespace is
/// ignored and the `Backdoors` spelling of the full dataset is accepted.
pub fn class_id(name: &str) -> Option<u8> {
    let name = name.trim();
    let name = if name == "Backdoors" { "Backdoor" } else { name };
    CLASS_NAMES.iter().position(|c| *c == name).map(|i| i as u8)
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unparseable cell at data row {row}, column `{column}`: {value:?}")]
    UnparseableCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("{0} contains no data rows")]
    EmptyFile(String),
    #[error("unexpected nominal column `{0}`")]
    UnexpectedNominalColumn(String),
    #[error("table has no rows")]
    EmptyTable,
}

/// Column storage for a [`FeatureTable`].
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Nominal(Vec<String>),
    LabelBinary(Vec<u8>),
    LabelCategory(Vec<u8>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Nominal(v) => v.len(),
            ColumnData::LabelBinary(v) => v.len(),
            ColumnData::LabelCategory(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Nominal(_) => ColumnKind::Nominal,
            ColumnData::LabelBinary(_) => ColumnKind::LabelBinary,
            ColumnData::LabelCategory(_) => ColumnKind::LabelCategory,
        }
    }
}

/// Raw mixed numeric/nominal records, stored column-wise.
///
/// Every column holds exactly `n_rows` values, numeric values are finite,
/// nominal values are non-empty (nulls already replaced by `other`) and label
/// columns are validated at load time.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    columns: Vec<ColumnSpec>,
    data: Vec<ColumnData>,
    n_rows: usize,
    source: String,
}

impl FeatureTable {
    /// Assembles a table from already-validated columns.
    ///
    /// Panics if the column count or lengths disagree.
    pub fn new(columns: Vec<ColumnSpec>, data: Vec<ColumnData>, source: impl Into<String>) -> Self {
        assert_eq!(columns.len(), data.len(), "one data vector per column");
        let n_rows = data.first().map_or(0, ColumnData::len);
        for (spec, col) in columns.iter().zip(&data) {
            assert_eq!(col.len(), n_rows, "column `{}` has wrong length", spec.name);
            assert_eq!(col.kind(), spec.kind, "column `{}` has wrong kind", spec.name);
        }
        Self {
            columns,
            data,
            n_rows,
            source: source.into(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .map(|i| &self.data[i])
    }

    pub(crate) fn iter_columns(&self) -> impl Iterator<Item = (&ColumnSpec, &ColumnData)> {
        self.columns.iter().zip(&self.data)
    }

    /// Copy of the given rows, in the given order.
    pub fn slice_rows(&self, rows: &[usize]) -> FeatureTable {
        let data = self
            .data
            .iter()
            .map(|c| match c {
                ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
                ColumnData::Nominal(v) => {
                    ColumnData::Nominal(rows.iter().map(|&r| v[r].clone()).collect())
                }
                ColumnData::LabelBinary(v) => {
                    ColumnData::LabelBinary(rows.iter().map(|&r| v[r]).collect())
                }
                ColumnData::LabelCategory(v) => {
                    ColumnData::LabelCategory(rows.iter().map(|&r| v[r]).collect())
                }
            })
            .collect();
        FeatureTable::new(self.columns.clone(), data, self.source.clone())
    }
}

/// Classification task: which label column drives the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Binary,
    Multiclass,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Binary => "binary",
            Task::Multiclass => "multiclass",
        }
    }

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            Task::Binary => &BINARY_CLASS_NAMES,
            Task::Multiclass => &CLASS_NAMES,
        }
    }

    /// All class ids of this task, in order.
    pub fn classes(self) -> Vec<usize> {
        (0..self.class_names().len()).collect()
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binary" => Ok(Task::Binary),
            "multiclass" => Ok(Task::Multiclass),
            other => Err(format!("unknown task `{other}` (expected binary|multiclass)")),
        }
    }
}

/// Dense numeric data, stored features × samples, with the two label vectors
/// carried alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub values: Matrix,
    pub feature_names: Vec<String>,
    pub labels_binary: Vec<u8>,
    pub labels_multiclass: Vec<u8>,
}

impl DesignMatrix {
    /// Builds a design matrix, checking the shape invariants.
    ///
    /// Panics on inconsistent lengths or duplicate feature names; those are
    /// programming errors, never data errors.
    pub fn new(
        values: Matrix,
        feature_names: Vec<String>,
        labels_binary: Vec<u8>,
        labels_multiclass: Vec<u8>,
    ) -> Self {
        assert_eq!(values.rows(), feature_names.len(), "one name per feature row");
        assert_eq!(values.cols(), labels_binary.len(), "one binary label per sample");
        assert_eq!(values.cols(), labels_multiclass.len(), "one class label per sample");
        let mut seen = std::collections::HashSet::new();
        for n in &feature_names {
            assert!(seen.insert(n.as_str()), "duplicate feature name `{n}`");
        }
        Self {
            values,
            feature_names,
            labels_binary,
            labels_multiclass,
        }
    }

    /// Unlabelled matrix; both label vectors are zero.
    pub fn unlabeled(values: Matrix, feature_names: Vec<String>) -> Self {
        let n = values.cols();
        Self::new(values, feature_names, vec![0; n], vec![0; n])
    }

    pub fn n_features(&self) -> usize {
        self.values.rows()
    }

    pub fn n_samples(&self) -> usize {
        self.values.cols()
    }

    pub fn labels(&self, task: Task) -> Vec<usize> {
        match task {
            Task::Binary => self.labels_binary.iter().map(|&l| l as usize).collect(),
            Task::Multiclass => self.labels_multiclass.iter().map(|&l| l as usize).collect(),
        }
    }

    /// Same labels, new feature block.
    pub fn with_values(&self, values: Matrix, feature_names: Vec<String>) -> DesignMatrix {
        DesignMatrix::new(
            values,
            feature_names,
            self.labels_binary.clone(),
            self.labels_multiclass.clone(),
        )
    }

    /// Samples × features copy, the layout classifiers work in.
    pub fn samples_major(&self) -> Matrix {
        self.values.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_ids_are_alphabetical() {
        let mut sorted = CLASS_NAMES.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, CLASS_NAMES.to_vec());
        assert_eq!(class_id("Normal"), Some(6));
        assert_eq!(class_id(" Backdoors "), Some(1));
        assert_eq!(class_id("Botnet"), None);
    }

    #[test]
    #[should_panic(expected = "duplicate feature name")]
    fn duplicate_feature_names_rejected() {
        DesignMatrix::unlabeled(Matrix::zeros(2, 1), vec!["a".into(), "a".into()]);
    }
}
