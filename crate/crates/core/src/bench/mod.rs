//! Experiment driver: single runs, cached grids, table rendering and the
//! method-vs-method comparison.

mod compare;
mod config;
mod io;
mod runner;
mod tables;

pub use compare::{compare_runs, BestCell, ComparisonSummary, KComparison, TaskComparison, Verdict};
pub use config::{parse_kv, ReducerConfig, RunConfig, CONFIG_KEYS};
pub use io::{read_reports, read_reports_file, write_report};
pub use runner::{median, run_experiment, run_grid, GridFailure, GridResult, Session};
pub use tables::{comparison_table, emit_tables, parse_table, per_class_table, write_tables, Table, TableFormat};

use std::path::PathBuf;

use thiserror::Error;

use crate::classifiers::ClassifierError;
use crate::container::ContainerError;
use crate::dataset::IngestError;
use crate::metrics::MetricsError;
use crate::reduction::ReductionError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Ingest {
        context: String,
        #[source]
        source: IngestError,
    },
    #[error("{context}: {source}")]
    Reduction {
        context: String,
        #[source]
        source: ReductionError,
    },
    #[error("{context}: {source}")]
    Classifier {
        context: String,
        #[source]
        source: ClassifierError,
    },
    #[error("{context}: {source}")]
    Metrics {
        context: String,
        #[source]
        source: MetricsError,
    },
    #[error("{context}: {source}")]
    Container {
        context: String,
        #[source]
        source: ContainerError,
    },
    #[error("{path}:{line}: {message}")]
    Report {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("no reports given")]
    NoReports,
    #[error("reports in one table must share task and K: {0}")]
    MixedTaskReports(String),
    #[error("insufficient coverage: {0}")]
    InsufficientCoverage(String),
    #[error("table parse: {0}")]
    TableParse(String),
}

impl BenchError {
    /// Stable machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            BenchError::Config(_) => "config",
            BenchError::Io { .. } => "io",
            BenchError::Ingest { .. } => "ingest",
            BenchError::Reduction { .. } => "reduction",
            BenchError::Classifier { .. } => "classifier",
            BenchError::Metrics { .. } => "metrics",
            BenchError::Container { .. } => "container",
            BenchError::Report { .. } => "report",
            BenchError::NoReports => "no_reports",
            BenchError::MixedTaskReports(_) => "mixed_task_reports",
            BenchError::InsufficientCoverage(_) => "insufficient_coverage",
            BenchError::TableParse(_) => "table_parse",
        }
    }
}
