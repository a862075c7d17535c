//! Comparison and per-class result tables in CSV or markdown.
//!
//! Both formats carry the same cells, so either one parses back to the same
//! [`Table`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::BenchError;
use crate::classifiers::ClassifierKind;
use crate::dataset::Task;
use crate::metrics::EvalReport;
use crate::reduction::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(format!("unknown format `{other}` (expected csv|markdown)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `binary_k8`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

const NA: &str = "n/a";

impl Table {
    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
            }
            TableFormat::Markdown => {
                let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
                let mut s = line(&self.header);
                s.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
                for r in &self.rows {
                    s.push_str(&line(r));
                }
                s
            }
        }
    }

    /// Column index by header text.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Parses a rendered table back. The name is not part of the content and
/// comes back empty.
pub fn parse_table(text: &str, format: TableFormat) -> Result<Table, BenchError> {
    let mut rows: Vec<Vec<String>> = match format {
        TableFormat::Csv => {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
            r.records()
                .map(|rec| {
                    rec.map(|rec| rec.iter().map(str::to_string).collect())
                        .map_err(|e| BenchError::TableParse(e.to_string()))
                })
                .collect::<Result<_, _>>()?
        }
        TableFormat::Markdown => {
            let mut out = Vec::new();
            for (i, line) in text.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
                let inner = line
                    .strip_prefix('|')
                    .and_then(|l| l.strip_suffix('|'))
                    .ok_or_else(|| BenchError::TableParse(format!("line {}: not a table row", i + 1)))?;
                if i == 1 {
                    continue; // separator
                }
                out.push(inner.split('|').map(|c| c.trim().to_string()).collect());
            }
            out
        }
    };
    if rows.is_empty() {
        return Err(BenchError::TableParse("no header row".into()));
    }
    let header = rows.remove(0);
    if let Some(bad) = rows.iter().position(|r| r.len() != header.len()) {
        return Err(BenchError::TableParse(format!("row {} has the wrong width", bad + 1)));
    }
    Ok(Table {
        name: String::new(),
        header,
        rows,
    })
}

const METHOD_ORDER: [Method; 3] = [Method::None, Method::Selection, Method::Extraction];

fn method_label(m: Method) -> &'static str {
    match m {
        Method::None => "None",
        Method::Selection => "Selection",
        Method::Extraction => "Extraction",
    }
}

/// One row per classifier, with P/R/F1 and both times for each method, for
/// reports sharing a task and K.
pub fn comparison_table(reports: &[&EvalReport]) -> Result<Table, BenchError> {
    let first = reports.first().ok_or(BenchError::NoReports)?;
    let (task, k) = (first.label.task, first.label.k);
    if let Some(r) = reports.iter().find(|r| r.label.task != task || r.label.k != k) {
        return Err(BenchError::MixedTaskReports(format!(
            "{task} K={k} and {} K={}",
            r.label.task, r.label.k
        )));
    }
    let mut cells: BTreeMap<(Method, ClassifierKind), &EvalReport> = BTreeMap::new();
    for r in reports {
        if cells.insert((r.label.method, r.label.classifier), r).is_some() {
            return Err(BenchError::MixedTaskReports(format!(
                "duplicate {} / {} at {task} K={k}",
                r.label.method, r.label.classifier
            )));
        }
    }
    let methods: Vec<Method> = METHOD_ORDER
        .into_iter()
        .filter(|m| cells.keys().any(|(cm, _)| cm == m))
        .collect();
    let classifiers: Vec<ClassifierKind> = ClassifierKind::ALL
        .into_iter()
        .filter(|c| cells.keys().any(|(_, cc)| cc == c))
        .collect();

    let mut header = vec!["Classifier".to_string()];
    for m in &methods {
        let l = method_label(*m);
        for col in ["P", "R", "F1", "Train (s)", "Infer (μs)"] {
            header.push(format!("{l} {col}"));
        }
    }
    let rows = classifiers
        .iter()
        .map(|c| {
            let mut row = vec![c.display_name().to_string()];
            for m in &methods {
                match cells.get(&(*m, *c)) {
                    Some(r) => row.extend([
                        format!("{:.2}", r.precision),
                        format!("{:.2}", r.recall),
                        format!("{:.2}", r.f1),
                        format!("{:.4}", r.timing.training_time),
                        format!("{:.2}", r.timing.inference_time_per_sample),
                    ]),
                    None => row.extend(std::iter::repeat_n(NA.to_string(), 5)),
                }
            }
            row
        })
        .collect();
    Ok(Table {
        name: format!("{task}_k{k}"),
        header,
        rows,
    })
}

/// Per-class accuracy across K for each method's best classifier (highest
/// mean F1 over the K values it was run at).
pub fn per_class_table(task: Task, reports: &[&EvalReport]) -> Result<Table, BenchError> {
    if reports.is_empty() {
        return Err(BenchError::NoReports);
    }
    if let Some(r) = reports.iter().find(|r| r.label.task != task) {
        return Err(BenchError::MixedTaskReports(format!("{task} and {}", r.label.task)));
    }
    let mut header = vec!["Method".to_string(), "Classifier".to_string(), "K".to_string()];
    header.extend(task.class_names().iter().map(|s| s.to_string()));
    let mut rows = Vec::new();
    for m in METHOD_ORDER {
        let of_method: Vec<&EvalReport> = reports.iter().copied().filter(|r| r.label.method == m).collect();
        let Some(best) = best_classifier(&of_method) else {
            continue;
        };
        let mut chosen: Vec<&EvalReport> = of_method.into_iter().filter(|r| r.label.classifier == best).collect();
        chosen.sort_by_key(|r| r.label.k);
        for r in chosen {
            let mut row = vec![
                method_label(m).to_string(),
                best.display_name().to_string(),
                r.label.k.to_string(),
            ];
            row.extend(r.per_class_accuracy.iter().map(|a| match a {
                Some(v) => format!("{v:.2}"),
                None => NA.to_string(),
            }));
            rows.push(row);
        }
    }
    Ok(Table {
        name: format!("{task}_per_class"),
        header,
        rows,
    })
}

/// Classifier with the highest mean F1; earlier classifiers win ties.
pub(crate) fn best_classifier(reports: &[&EvalReport]) -> Option<ClassifierKind> {
    let mut best: Option<(ClassifierKind, f64)> = None;
    for c in ClassifierKind::ALL {
        let f1s: Vec<f64> = reports.iter().filter(|r| r.label.classifier == c).map(|r| r.f1).collect();
        if f1s.is_empty() {
            continue;
        }
        let mean = f1s.iter().sum::<f64>() / f1s.len() as f64;
        if best.is_none_or(|(_, b)| mean > b) {
            best = Some((c, mean));
        }
    }
    best.map(|(c, _)| c)
}

/// All tables for a set of reports: one comparison table per (task, K), then
/// one per-class table per task, in task/K order.
pub fn emit_tables(reports: &[EvalReport]) -> Result<Vec<Table>, BenchError> {
    if reports.is_empty() {
        return Err(BenchError::NoReports);
    }
    let mut groups: BTreeMap<(Task, usize), Vec<&EvalReport>> = BTreeMap::new();
    for r in reports {
        groups.entry((r.label.task, r.label.k)).or_default().push(r);
    }
    let mut tables = Vec::new();
    for group in groups.values() {
        tables.push(comparison_table(group)?);
    }
    for task in [Task::Binary, Task::Multiclass] {
        let of_task: Vec<&EvalReport> = reports.iter().filter(|r| r.label.task == task).collect();
        if !of_task.is_empty() {
            tables.push(per_class_table(task, &of_task)?);
        }
    }
    Ok(tables)
}

pub fn write_tables(dir: &Path, tables: &[Table], format: TableFormat) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    tables
        .iter()
        .map(|t| {
            let path = dir.join(format!("{}.{}", t.name, format.extension()));
            std::fs::write(&path, t.render(format)).map_err(|source| BenchError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(path)
        })
        .collect()
}
