use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, NOMINAL_COLUMNS};
use super::{ColumnData, DesignMatrix, FeatureTable, IngestError};
use crate::matrix::Matrix;

/// Columns never turned into features.
pub const DROPPED_COLUMNS: [&str; 2] = ["id", "attack_cat"];

/// One source column of the encoded output, in output order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "column", rename_all = "snake_case")]
pub enum EncodedColumn {
    Numeric(String),
    /// Expanded into one indicator per category of `onehot_maps[column]`.
    OneHot(String),
}

/// Fitted preprocessing: which columns are dropped, how nominal columns
/// expand, and (optionally) per-feature min-max bounds.
///
/// Fitted on training data only and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub dropped_columns: BTreeSet<String>,
    pub columns: Vec<EncodedColumn>,
    /// Sorted, duplicate-free categories seen in training.
    pub onehot_maps: BTreeMap<String, Vec<String>>,
    /// One `(min, max)` pair per output feature; empty unless `apply_minmax`.
    pub minmax_bounds: Vec<(f64, f64)>,
    pub apply_minmax: bool,
}

impl EncoderSpec {
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for col in &self.columns {
            match col {
                EncodedColumn::Numeric(name) => names.push(name.clone()),
                EncodedColumn::OneHot(name) => {
                    for cat in &self.onehot_maps[name] {
                        names.push(format!("{name}_{cat}"));
                    }
                }
            }
        }
        names
    }

    pub fn n_features(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c {
                EncodedColumn::Numeric(_) => 1,
                EncodedColumn::OneHot(name) => self.onehot_maps[name].len(),
            })
            .sum()
    }
}

/// Fits the encoder on a training table.
pub fn fit_encoder(train: &FeatureTable, apply_minmax: bool) -> Result<EncoderSpec, IngestError> {
    if train.n_rows() == 0 {
        return Err(IngestError::EmptyTable);
    }
    let dropped_columns: BTreeSet<String> = DROPPED_COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut columns = Vec::new();
    let mut onehot_maps = BTreeMap::new();
    for (spec, data) in train.iter_columns() {
        if dropped_columns.contains(&spec.name) {
            continue;
        }
        match data {
            ColumnData::Numeric(_) => columns.push(EncodedColumn::Numeric(spec.name.clone())),
            ColumnData::Nominal(values) => {
                if !NOMINAL_COLUMNS.contains(&spec.name.as_str()) {
                    return Err(IngestError::UnexpectedNominalColumn(spec.name.clone()));
                }
                let cats: BTreeSet<&str> = values.iter().map(String::as_str).collect();
                onehot_maps.insert(
                    spec.name.clone(),
                    cats.into_iter().map(str::to_string).collect::<Vec<_>>(),
                );
                columns.push(EncodedColumn::OneHot(spec.name.clone()));
            }
            ColumnData::LabelBinary(_) | ColumnData::LabelCategory(_) => {}
        }
    }
    let mut spec = EncoderSpec {
        dropped_columns,
        columns,
        onehot_maps,
        minmax_bounds: Vec::new(),
        apply_minmax: false,
    };
    if apply_minmax {
        let raw = encode_values(&spec, train)?;
        spec.minmax_bounds = (0..raw.rows())
            .map(|r| {
                raw.row(r)
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
            })
            .collect();
        spec.apply_minmax = true;
    }
    Ok(spec)
}

/// Encodes a table with a fitted spec. Categories unseen at fit time encode as
/// all-zero indicators; min-max output is clamped to `[0, 1]`.
pub fn apply_encoder(spec: &EncoderSpec, table: &FeatureTable) -> Result<DesignMatrix, IngestError> {
    let mut values = encode_values(spec, table)?;
    if spec.apply_minmax {
        for (r, &(lo, hi)) in spec.minmax_bounds.iter().enumerate() {
            let range = hi - lo;
            for v in values.row_mut(r) {
                *v = if range > 0.0 {
                    ((*v - lo) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
        }
    }
    let labels_binary = match find_kind(table, ColumnKind::LabelBinary) {
        Some(ColumnData::LabelBinary(v)) => v.clone(),
        _ => return Err(IngestError::MissingColumn("label".into())),
    };
    let labels_multiclass = match find_kind(table, ColumnKind::LabelCategory) {
        Some(ColumnData::LabelCategory(v)) => v.clone(),
        _ => return Err(IngestError::MissingColumn("attack_cat".into())),
    };
    Ok(DesignMatrix::new(
        values,
        spec.feature_names(),
        labels_binary,
        labels_multiclass,
    ))
}

fn find_kind(table: &FeatureTable, kind: ColumnKind) -> Option<&ColumnData> {
    table
        .iter_columns()
        .find(|(spec, _)| spec.kind == kind)
        .map(|(_, d)| d)
}

fn encode_values(spec: &EncoderSpec, table: &FeatureTable) -> Result<Matrix, IngestError> {
    let n = table.n_rows();
    let mut values = Matrix::zeros(spec.n_features(), n);
    let mut row = 0usize;
    for col in &spec.columns {
        match col {
            EncodedColumn::Numeric(name) => match table.column(name) {
                Some(ColumnData::Numeric(v)) => {
                    values.row_mut(row).copy_from_slice(v);
                    row += 1;
                }
                _ => return Err(IngestError::MissingColumn(name.clone())),
            },
            EncodedColumn::OneHot(name) => {
                let cats = &spec.onehot_maps[name];
                let data = match table.column(name) {
                    Some(ColumnData::Nominal(v)) => v,
                    _ => return Err(IngestError::MissingColumn(name.clone())),
                };
                let index: HashMap<&str, usize> =
                    cats.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
                for (sample, cat) in data.iter().enumerate() {
                    if let Some(&i) = index.get(cat.as_str()) {
                        values[(row + i, sample)] = 1.0;
                    }
                }
                row += cats.len();
            }
        }
    }
    Ok(values)
}
