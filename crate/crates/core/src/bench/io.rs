use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::BenchError;
use crate::metrics::EvalReport;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes one report as a single JSON line, replacing the file.
pub fn write_report(path: &Path, report: &EvalReport) -> Result<(), BenchError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    let line = serde_json::to_string(report).expect("report serializes");
    writeln!(f, "{line}").map_err(io_err(path))?;
    Ok(())
}

pub fn read_reports_file(path: &Path) -> Result<Vec<EvalReport>, BenchError> {
    let f = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| BenchError::Report {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(r);
    }
    Ok(out)
}

/// Reads reports from files and from every `*.jsonl` below any directory
/// given, in sorted path order.
pub fn read_reports(paths: &[PathBuf]) -> Result<Vec<EvalReport>, BenchError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            collect_jsonl(p, &mut files)?;
        } else {
            files.push(p.clone());
        }
    }
    files.sort();
    let mut out = Vec::new();
    for f in &files {
        out.extend(read_reports_file(f)?);
    }
    Ok(out)
}

fn collect_jsonl(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), BenchError> {
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_dir() {
            collect_jsonl(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "jsonl") {
            out.push(path);
        }
    }
    Ok(())
}
