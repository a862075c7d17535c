use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::schema::{ColumnKind, Schema};
use super::{class_id, ColumnData, FeatureTable, IngestError};

/// Category substituted for null nominal cells.
pub(crate) const NULL_CATEGORY: &str = "other";

fn is_null_token(s: &str) -> bool {
    matches!(s, "" | "-") || s.eq_ignore_ascii_case("null") || s.eq_ignore_ascii_case("nan")
}

/// Loads a flow-record CSV, picking the schema's columns by header name.
///
/// Extra columns in the file are ignored. Row numbers in errors count data
/// rows from 1 (the header is not counted).
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<FeatureTable, IngestError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: display.clone(),
        source,
    })?;
    let table = load_csv_reader(std::io::BufReader::new(file), schema, &display)?;
    log::info!("loaded {} rows from {}", table.n_rows(), display);
    Ok(table)
}

/// Same as [`load_csv`] over any reader; `source` is used in messages.
pub fn load_csv_reader<R: Read>(
    reader: R,
    schema: &Schema,
    source: &str,
) -> Result<FeatureTable, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(IngestError::EmptyFile(source.to_string()));
    }
    let mut positions = Vec::with_capacity(schema.len());
    for col in &schema.columns {
        let idx = headers
            .iter()
            .position(|h| h == col.name)
            .ok_or_else(|| IngestError::MissingColumn(col.name.clone()))?;
        positions.push(idx);
    }

    let mut data: Vec<ColumnData> = schema
        .columns
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Numeric => ColumnData::Numeric(Vec::new()),
            ColumnKind::Nominal => ColumnData::Nominal(Vec::new()),
            ColumnKind::LabelBinary => ColumnData::LabelBinary(Vec::new()),
            ColumnKind::LabelCategory => ColumnData::LabelCategory(Vec::new()),
        })
        .collect();

    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    while rdr.read_record(&mut record)? {
        row += 1;
        for ((spec, &pos), out) in schema.columns.iter().zip(&positions).zip(data.iter_mut()) {
            let raw = record.get(pos).unwrap_or("");
            let bad = || IngestError::UnparseableCell {
                row,
                column: spec.name.clone(),
                value: raw.to_string(),
            };
            match out {
                ColumnData::Numeric(v) => {
                    let x: f64 = raw.parse().map_err(|_| bad())?;
                    if !x.is_finite() {
                        return Err(bad());
                    }
                    v.push(x);
                }
                ColumnData::Nominal(v) => {
                    if is_null_token(raw) {
                        v.push(NULL_CATEGORY.to_string());
                    } else {
                        v.push(raw.to_string());
                    }
                }
                ColumnData::LabelBinary(v) => match raw {
                    "0" | "0.0" => v.push(0),
                    "1" | "1.0" => v.push(1),
                    _ => return Err(bad()),
                },
                ColumnData::LabelCategory(v) => v.push(class_id(raw).ok_or_else(bad)?),
            }
        }
    }
    if row == 0 {
        return Err(IngestError::EmptyFile(source.to_string()));
    }
    Ok(FeatureTable::new(schema.columns.clone(), data, source))
}
