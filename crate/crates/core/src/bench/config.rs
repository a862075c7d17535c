//! Run configuration: a flat `key = value` file, optionally overridden by
//! command-line flags, resolved into a [`RunConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::BenchError;
use crate::classifiers::{ClassifierKind, ClassifierSpec};
use crate::dataset::Task;
use crate::metrics::Averaging;
use crate::reduction::{self, Criterion, Method};

/// Which reducer a run fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducerConfig {
    None,
    Selection(Criterion),
    Extraction { k: usize },
}

impl ReducerConfig {
    pub fn method(&self) -> Method {
        match self {
            ReducerConfig::None => Method::None,
            ReducerConfig::Selection(_) => Method::Selection,
            ReducerConfig::Extraction { .. } => Method::Extraction,
        }
    }

    /// Short stable tag, used in file names and cache keys.
    pub fn tag(&self) -> String {
        match self {
            ReducerConfig::None => "none".into(),
            ReducerConfig::Selection(Criterion::TopK(k)) => format!("selection_k{k}"),
            ReducerConfig::Selection(Criterion::Threshold(t)) => format!("selection_t{t}"),
            ReducerConfig::Extraction { k } => format!("extraction_k{k}"),
        }
    }

    /// The reference grid's six reducers: both methods at K ∈ {4, 8, 16}.
    pub fn reference_grid() -> Vec<ReducerConfig> {
        let ks = [4, 8, 16];
        ks.iter()
            .map(|&k| ReducerConfig::Selection(Criterion::TopK(k)))
            .chain(ks.iter().map(|&k| ReducerConfig::Extraction { k }))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub train_path: PathBuf,
    pub test_path: PathBuf,
    pub task: Task,
    pub reducer: ReducerConfig,
    pub classifier: ClassifierKind,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Timed passes per run; the median of each component is reported.
    pub repeat: usize,
    pub averaging: Averaging,
    pub correlation: reduction::Averaging,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train_path: PathBuf::new(),
            test_path: PathBuf::new(),
            task: Task::Binary,
            reducer: ReducerConfig::None,
            classifier: ClassifierKind::DecisionTree,
            seed: 0,
            output_dir: None,
            repeat: 3,
            averaging: Averaging::Weighted,
            correlation: reduction::Averaging::Signed,
        }
    }
}

pub const CONFIG_KEYS: [&str; 12] = [
    "train",
    "test",
    "task",
    "reducer",
    "k",
    "threshold",
    "classifier",
    "seed",
    "out",
    "repeat",
    "averaging",
    "correlation",
];

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, BenchError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| BenchError::Config(format!("line {}: expected key = value", n + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, BenchError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| BenchError::Config(format!("{key} = {v}: {e}")))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_kv(&parse_kv(&text)?)
    }

    /// Builds a config from key/value pairs on top of the defaults.
    pub fn from_kv(kv: &BTreeMap<String, String>) -> Result<Self, BenchError> {
        let mut cfg = RunConfig::default();
        cfg.apply_kv(kv)?;
        Ok(cfg)
    }

    /// Overrides fields present in `kv`. `reducer`, `k` and `threshold` are
    /// resolved together, so `k` alone changes the size of the current reducer.
    pub fn apply_kv(&mut self, kv: &BTreeMap<String, String>) -> Result<(), BenchError> {
        for key in kv.keys() {
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(BenchError::Config(format!("unknown key `{key}`")));
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        if let Some(v) = get("train") {
            self.train_path = v.into();
        }
        if let Some(v) = get("test") {
            self.test_path = v.into();
        }
        if let Some(v) = get("task") {
            self.task = parse("task", v)?;
        }
        if let Some(v) = get("classifier") {
            self.classifier = parse("classifier", v)?;
        }
        if let Some(v) = get("seed") {
            self.seed = parse("seed", v)?;
        }
        if let Some(v) = get("out") {
            self.output_dir = Some(v.into());
        }
        if let Some(v) = get("repeat") {
            self.repeat = parse("repeat", v)?;
        }
        if let Some(v) = get("averaging") {
            self.averaging = parse("averaging", v)?;
        }
        if let Some(v) = get("correlation") {
            self.correlation = match v.to_ascii_lowercase().as_str() {
                "signed" => reduction::Averaging::Signed,
                "absolute" => reduction::Averaging::Absolute,
                _ => return Err(BenchError::Config(format!("correlation = {v}: expected signed|absolute"))),
            };
        }

        let method = match get("reducer") {
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "none" => Method::None,
                "selection" => Method::Selection,
                "extraction" => Method::Extraction,
                _ => {
                    return Err(BenchError::Config(format!(
                        "reducer = {v}: expected none|selection|extraction"
                    )))
                }
            },
            None => self.reducer.method(),
        };
        let k: Option<usize> = get("k").map(|v| parse("k", v)).transpose()?;
        let threshold: Option<f64> = get("threshold").map(|v| parse("threshold", v)).transpose()?;
        let current_k = match self.reducer {
            ReducerConfig::Selection(Criterion::TopK(k)) | ReducerConfig::Extraction { k } => Some(k),
            _ => None,
        };
        self.reducer = match method {
            Method::None => ReducerConfig::None,
            Method::Selection => match (k, threshold) {
                (Some(_), Some(_)) => {
                    return Err(BenchError::Config("give either k or threshold for selection, not both".into()))
                }
                (None, Some(t)) => ReducerConfig::Selection(Criterion::Threshold(t)),
                (Some(k), None) => ReducerConfig::Selection(Criterion::TopK(k)),
                (None, None) => match self.reducer {
                    ReducerConfig::Selection(c) => ReducerConfig::Selection(c),
                    _ => ReducerConfig::Selection(Criterion::TopK(current_k.ok_or_else(|| {
                        BenchError::Config("selection needs k or threshold".into())
                    })?)),
                },
            },
            Method::Extraction => {
                if threshold.is_some() {
                    return Err(BenchError::Config("threshold applies to selection only".into()));
                }
                let k = k
                    .or(current_k)
                    .ok_or_else(|| BenchError::Config("extraction needs k".into()))?;
                ReducerConfig::Extraction { k }
            }
        };
        self.validate()
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repeat == 0 {
            return Err(BenchError::Config("repeat must be at least 1".into()));
        }
        match self.reducer {
            ReducerConfig::Selection(Criterion::TopK(0)) | ReducerConfig::Extraction { k: 0 } => {
                Err(BenchError::Config("k must be at least 1".into()))
            }
            ReducerConfig::Selection(Criterion::Threshold(t)) if !t.is_finite() => {
                Err(BenchError::Config(format!("threshold {t} is not finite")))
            }
            _ => Ok(()),
        }
    }

    pub fn classifier_spec(&self) -> ClassifierSpec {
        ClassifierSpec::reference(self.classifier, self.seed)
    }

    /// Canonical key/value form. Paths are included for provenance but left
    /// out of the fingerprint, which uses the dataset checksums instead.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("train".into(), self.train_path.display().to_string());
        m.insert("test".into(), self.test_path.display().to_string());
        m.insert("task".into(), self.task.as_str().into());
        m.insert("reducer".into(), self.reducer.method().as_str().into());
        match self.reducer {
            ReducerConfig::Selection(Criterion::TopK(k)) | ReducerConfig::Extraction { k } => {
                m.insert("k".into(), k.to_string());
            }
            ReducerConfig::Selection(Criterion::Threshold(t)) => {
                m.insert("threshold".into(), t.to_string());
            }
            ReducerConfig::None => {}
        }
        m.insert("classifier".into(), self.classifier.as_str().into());
        m.insert("seed".into(), self.seed.to_string());
        if let Some(out) = &self.output_dir {
            m.insert("out".into(), out.display().to_string());
        }
        m.insert("repeat".into(), self.repeat.to_string());
        m.insert(
            "averaging".into(),
            match self.averaging {
                Averaging::Weighted => "weighted",
                Averaging::Macro => "macro",
            }
            .into(),
        );
        m.insert(
            "correlation".into(),
            match self.correlation {
                reduction::Averaging::Signed => "signed",
                reduction::Averaging::Absolute => "absolute",
            }
            .into(),
        );
        m
    }

    pub fn fingerprint(&self, checksums: &BTreeMap<String, String>) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.resolved() {
            if matches!(k.as_str(), "train" | "test" | "out") {
                continue;
            }
            h.update(format!("{k}={v}\n"));
        }
        for (k, v) in checksums {
            h.update(format!("dataset.{k}={v}\n"));
        }
        hex::encode(h.finalize())
    }
}
