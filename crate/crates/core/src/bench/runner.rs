use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::rc::Rc;
use std::sync::Mutex;
use std::time::Instant;

use sha2::{Digest, Sha256};

use super::config::{ReducerConfig, RunConfig};
use super::io::write_report;
use super::BenchError;
use crate::classifiers::{self, ClassifierKind};
use crate::container::{save_artifact, ArtifactKind};
use crate::dataset::{apply_encoder, fit_encoder, load_csv, DesignMatrix, EncoderSpec, FeatureTable, Schema, Task};
use crate::metrics::{compose_timing, EvalReport, RunLabel};
use crate::reduction::{
    correlation_matrix, pca_fit, select_features, Averaging, Method, Reducer,
};

/// Only one timed fit/predict runs at a time, whichever thread asks.
static TIMING_TOKEN: Mutex<()> = Mutex::new(());

fn timing_token() -> std::sync::MutexGuard<'static, ()> {
    TIMING_TOKEN.lock().unwrap_or_else(|e| e.into_inner())
}

/// Median of the samples; mean of the middle two for an even count.
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

struct Encoded {
    spec: EncoderSpec,
    train: DesignMatrix,
    test: DesignMatrix,
}

struct FittedReducer {
    reducer: Reducer,
    train: DesignMatrix,
    test: DesignMatrix,
    fit_time: f64,
    transform_time: f64,
}

/// Loaded train/test tables plus every encoder and reducer fitted so far.
///
/// Reducers are unsupervised, so one fit serves every task and classifier;
/// its fit and transform times are charged to each run that uses it.
pub struct Session {
    train: FeatureTable,
    test: FeatureTable,
    checksums: BTreeMap<String, String>,
    encoded: BTreeMap<bool, Rc<Encoded>>,
    reducers: BTreeMap<String, Rc<FittedReducer>>,
}

fn sha256_file(path: &Path) -> Result<String, BenchError> {
    let bytes = std::fs::read(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Session {
    pub fn load(train_path: &Path, test_path: &Path) -> Result<Self, BenchError> {
        let schema = Schema::unsw_nb15();
        let load = |p: &Path| {
            load_csv(p, &schema).map_err(|source| BenchError::Ingest {
                context: p.display().to_string(),
                source,
            })
        };
        let train = load(train_path)?;
        let test = load(test_path)?;
        let mut checksums = BTreeMap::new();
        checksums.insert("train".to_string(), sha256_file(train_path)?);
        checksums.insert("test".to_string(), sha256_file(test_path)?);
        log::info!(
            "loaded {} train and {} test rows",
            train.n_rows(),
            test.n_rows()
        );
        Ok(Self::from_tables(train, test, checksums))
    }

    pub fn from_tables(train: FeatureTable, test: FeatureTable, checksums: BTreeMap<String, String>) -> Self {
        Self {
            train,
            test,
            checksums,
            encoded: BTreeMap::new(),
            reducers: BTreeMap::new(),
        }
    }

    pub fn checksums(&self) -> &BTreeMap<String, String> {
        &self.checksums
    }

    fn encoded(&mut self, minmax: bool, out: Option<&Path>) -> Result<Rc<Encoded>, BenchError> {
        if let Some(e) = self.encoded.get(&minmax) {
            return Ok(e.clone());
        }
        let ctx = |source| BenchError::Ingest {
            context: "encoding".into(),
            source,
        };
        let spec = fit_encoder(&self.train, minmax).map_err(ctx)?;
        let train = apply_encoder(&spec, &self.train).map_err(ctx)?;
        let test = apply_encoder(&spec, &self.test).map_err(ctx)?;
        if let Some(dir) = out {
            let name = if minmax { "encoder_minmax" } else { "encoder_raw" };
            save(dir, name, ArtifactKind::Encoder, &spec)?;
        }
        let e = Rc::new(Encoded { spec, train, test });
        self.encoded.insert(minmax, e.clone());
        Ok(e)
    }

    fn reducer(&mut self, cfg: &RunConfig) -> Result<Rc<FittedReducer>, BenchError> {
        let key = format!("{}_{:?}", cfg.reducer.tag(), cfg.correlation);
        if let Some(r) = self.reducers.get(&key) {
            return Ok(r.clone());
        }
        let out = cfg.output_dir.as_deref();
        let enc = self.encoded(cfg.reducer.method() == Method::Extraction, out)?;
        let ctx = |source| BenchError::Reduction {
            context: cfg.reducer.tag(),
            source,
        };

        let fitted = if cfg.reducer == ReducerConfig::None {
            FittedReducer {
                reducer: Reducer::Identity {
                    feature_names: enc.spec.feature_names(),
                },
                train: enc.train.clone(),
                test: enc.test.clone(),
                fit_time: 0.0,
                transform_time: 0.0,
            }
        } else {
            let mut fit_times = Vec::with_capacity(cfg.repeat);
            let mut transform_times = Vec::with_capacity(cfg.repeat);
            let mut result = None;
            for _ in 0..cfg.repeat {
                let _token = timing_token();
                let t0 = Instant::now();
                let reducer = fit_reducer(cfg, &enc.train).map_err(ctx)?;
                let train = reducer.transform(&enc.train).map_err(ctx)?;
                let t1 = Instant::now();
                let test = reducer.transform(&enc.test).map_err(ctx)?;
                let t2 = Instant::now();
                fit_times.push((t1 - t0).as_secs_f64());
                transform_times.push((t2 - t1).as_secs_f64());
                if result.is_none() {
                    result = Some((reducer, train, test));
                }
            }
            let (reducer, train, test) = result.expect("repeat >= 1");
            FittedReducer {
                reducer,
                train,
                test,
                fit_time: median(&fit_times),
                transform_time: median(&transform_times),
            }
        };
        if let Some(dir) = out {
            save(dir, &cfg.reducer.tag(), ArtifactKind::Reducer, &fitted.reducer)?;
        }
        log::info!(
            "fitted reducer {} -> {} features in {:.3}s",
            cfg.reducer.tag(),
            fitted.reducer.output_dim(),
            fitted.fit_time
        );
        let fitted = Rc::new(fitted);
        self.reducers.insert(key, fitted.clone());
        Ok(fitted)
    }

    /// Runs one grid cell. The reducer and encoder are reused when cached.
    pub fn run(&mut self, cfg: &RunConfig) -> Result<EvalReport, BenchError> {
        cfg.validate()?;
        let red = self.reducer(cfg)?;
        let context = format!("{}/{}/{}", cfg.task, cfg.reducer.tag(), cfg.classifier);
        let y_train = red.train.labels(cfg.task);
        let y_test = red.test.labels(cfg.task);
        let spec = cfg.classifier_spec();
        let cls_err = |source| BenchError::Classifier {
            context: context.clone(),
            source,
        };

        let mut fit_times = Vec::with_capacity(cfg.repeat);
        let mut predict_times = Vec::with_capacity(cfg.repeat);
        let mut predictions: Option<Vec<usize>> = None;
        for _ in 0..cfg.repeat {
            let _token = timing_token();
            let (model, t_fit) = classifiers::fit(&spec, &red.train, &y_train).map_err(cls_err)?;
            let (pred, t_pred) = classifiers::predict(&model, &red.test).map_err(cls_err)?;
            fit_times.push(t_fit);
            predict_times.push(t_pred);
            match &predictions {
                None => predictions = Some(pred),
                Some(first) if *first != pred => {
                    log::warn!("{context}: predictions differ between timed passes");
                }
                Some(_) => {}
            }
        }
        let y_pred = predictions.expect("repeat >= 1");
        let timing = compose_timing(
            red.fit_time,
            median(&fit_times),
            red.transform_time,
            median(&predict_times),
            y_test.len(),
        );
        let label = RunLabel {
            task: cfg.task,
            method: cfg.reducer.method(),
            k: red.reducer.output_dim(),
            classifier: cfg.classifier,
        };
        let mut report = EvalReport::from_predictions(label, &y_test, &y_pred, cfg.averaging, timing)
            .map_err(|source| BenchError::Metrics {
                context: context.clone(),
                source,
            })?;
        report.reduced_features = red.train.feature_names.clone();
        report.config = cfg.resolved();
        report.dataset_checksums = self.checksums.clone();
        report.fingerprint = cfg.fingerprint(&self.checksums);

        if let Some(dir) = &cfg.output_dir {
            write_report(&report_path(dir, cfg), &report)?;
        }
        log::info!(
            "{context}: P {:.2} R {:.2} F1 {:.2}, train {:.3}s, infer {:.2}us/sample",
            report.precision,
            report.recall,
            report.f1,
            timing.training_time,
            timing.inference_time_per_sample
        );
        Ok(report)
    }
}

fn fit_reducer(cfg: &RunConfig, x: &DesignMatrix) -> Result<Reducer, crate::reduction::ReductionError> {
    Ok(match cfg.reducer {
        ReducerConfig::None => Reducer::Identity {
            feature_names: x.feature_names.clone(),
        },
        ReducerConfig::Selection(criterion) => {
            let mut stats = correlation_matrix(x)?;
            if cfg.correlation == Averaging::Absolute {
                stats = stats.with_averaging(Averaging::Absolute);
            }
            Reducer::Selection(select_features(&stats, criterion)?)
        }
        ReducerConfig::Extraction { k } => Reducer::Extraction(pca_fit(x, k)?),
    })
}

fn save<T: serde::Serialize>(dir: &Path, name: &str, kind: ArtifactKind, value: &T) -> Result<(), BenchError> {
    let dir = dir.join("artifacts");
    std::fs::create_dir_all(&dir).map_err(|source| BenchError::Io {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join(format!("{name}.nmdl"));
    save_artifact(&path, kind, value).map_err(|source| BenchError::Container {
        context: path.display().to_string(),
        source,
    })
}

fn report_path(dir: &Path, cfg: &RunConfig) -> PathBuf {
    dir.join("runs")
        .join(format!("{}_{}_{}.jsonl", cfg.task, cfg.reducer.tag(), cfg.classifier))
}

/// Loads the data and runs a single configuration.
pub fn run_experiment(cfg: &RunConfig) -> Result<EvalReport, BenchError> {
    cfg.validate()?;
    Session::load(&cfg.train_path, &cfg.test_path)?.run(cfg)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridFailure {
    pub cell: String,
    pub kind: String,
    pub error: String,
}

#[derive(Debug, Default)]
pub struct GridResult {
    pub reports: Vec<EvalReport>,
    pub failures: Vec<GridFailure>,
}

/// Runs every (task, reducer, classifier) combination on top of `base`.
/// A failing cell is recorded and the grid carries on.
pub fn run_grid(
    base: &RunConfig,
    tasks: &[Task],
    reducers: &[ReducerConfig],
    classifiers: &[ClassifierKind],
) -> Result<GridResult, BenchError> {
    if tasks.is_empty() || reducers.is_empty() || classifiers.is_empty() {
        return Err(BenchError::Config("grid needs at least one task, reducer and classifier".into()));
    }
    let mut session = Session::load(&base.train_path, &base.test_path)?;
    Ok(run_grid_in(&mut session, base, tasks, reducers, classifiers))
}

impl Session {
    pub fn run_grid(
        &mut self,
        base: &RunConfig,
        tasks: &[Task],
        reducers: &[ReducerConfig],
        classifiers: &[ClassifierKind],
    ) -> GridResult {
        run_grid_in(self, base, tasks, reducers, classifiers)
    }
}

fn run_grid_in(
    session: &mut Session,
    base: &RunConfig,
    tasks: &[Task],
    reducers: &[ReducerConfig],
    classifiers: &[ClassifierKind],
) -> GridResult {
    let mut result = GridResult::default();
    for &task in tasks {
        for &reducer in reducers {
            for &classifier in classifiers {
                let cfg = RunConfig {
                    task,
                    reducer,
                    classifier,
                    ..base.clone()
                };
                match session.run(&cfg) {
                    Ok(r) => result.reports.push(r),
                    Err(e) => {
                        let cell = format!("{task}/{}/{classifier}", reducer.tag());
                        log::error!("{cell}: {e}");
                        result.failures.push(GridFailure {
                            cell,
                            kind: e.kind().into(),
                            error: e.to_string(),
                        });
                    }
                }
            }
        }
    }
    result
}
