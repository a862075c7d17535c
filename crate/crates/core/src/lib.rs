//! Benchmark toolkit comparing correlation-based feature selection with PCA
//! feature extraction for flow-based network intrusion detection.
//!
//! The pipeline is ingest → encode → reduce → classify → evaluate:
//!
//! * [`dataset`] loads flow-record CSVs and fits the one-hot/min-max encoder;
//! * [`reduction`] fits either a [`reduction::SelectionModel`] or an
//!   [`reduction::ExtractionModel`];
//! * [`classifiers`] holds the five in-repo classifiers;
//! * [`metrics`] turns predictions and timings into an [`metrics::EvalReport`];
//! * [`bench`] drives single runs and full grids and renders tables.

pub mod bench;
pub mod classifiers;
pub mod container;
pub mod dataset;
pub mod matrix;
pub mod metrics;
pub mod reduction;
