//! Five classifiers behind one fit/predict contract.
//!
//! All of them are implemented here (no external ML library) so that the
//! measured fit and predict times reflect the algorithms themselves. Fitting
//! and prediction are single-threaded and deterministic given the spec seed.

pub mod forest;
pub mod knn;
pub mod mlp;
pub mod naive_bayes;
pub mod tree;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DesignMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("training labels contain a single class")]
    SingleClassInput,
    #[error("non-finite value at sample {sample}, feature {feature}")]
    NonFiniteFeature { sample: usize, feature: usize },
    #[error("input has {found} features, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{samples} samples but {labels} labels")]
    LengthMismatch { samples: usize, labels: usize },
    #[error("need at least 2 training samples, got {0}")]
    NotEnoughSamples(usize),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    DecisionTree,
    RandomForest,
    KNeighbors,
    Mlp,
    BernoulliNb,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
        ClassifierKind::KNeighbors,
        ClassifierKind::Mlp,
        ClassifierKind::BernoulliNb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::KNeighbors => "k_neighbors",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::BernoulliNb => "bernoulli_nb",
        }
    }

    /// Row label used in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "Decision Tree",
            ClassifierKind::RandomForest => "Random Forest",
            ClassifierKind::KNeighbors => "KNeighbors",
            ClassifierKind::Mlp => "MLP",
            ClassifierKind::BernoulliNb => "Naive Bayes",
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s || k.display_name().to_ascii_lowercase() == s)
            .ok_or_else(|| {
                format!(
                    "unknown classifier `{s}` (expected one of decision_tree, random_forest, k_neighbors, mlp, bernoulli_nb)"
                )
            })
    }
}

/// Per-kind hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperparams {
    DecisionTree(tree::TreeParams),
    RandomForest(forest::ForestParams),
    KNeighbors(knn::KnnParams),
    Mlp(mlp::MlpParams),
    BernoulliNb(naive_bayes::NbParams),
}

impl Hyperparams {
    /// Settings of the reference experiment grid.
    pub fn reference(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::DecisionTree => Hyperparams::DecisionTree(tree::TreeParams::default()),
            ClassifierKind::RandomForest => Hyperparams::RandomForest(forest::ForestParams::default()),
            ClassifierKind::KNeighbors => Hyperparams::KNeighbors(knn::KnnParams::default()),
            ClassifierKind::Mlp => Hyperparams::Mlp(mlp::MlpParams::default()),
            ClassifierKind::BernoulliNb => Hyperparams::BernoulliNb(naive_bayes::NbParams::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Hyperparams::DecisionTree(_) => ClassifierKind::DecisionTree,
            Hyperparams::RandomForest(_) => ClassifierKind::RandomForest,
            Hyperparams::KNeighbors(_) => ClassifierKind::KNeighbors,
            Hyperparams::Mlp(_) => ClassifierKind::Mlp,
            Hyperparams::BernoulliNb(_) => ClassifierKind::BernoulliNb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub hyperparams: Hyperparams,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(hyperparams: Hyperparams, seed: u64) -> Self {
        Self { hyperparams, seed }
    }

    pub fn reference(kind: ClassifierKind, seed: u64) -> Self {
        Self::new(Hyperparams::reference(kind), seed)
    }

    pub fn kind(&self) -> ClassifierKind {
        self.hyperparams.kind()
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::InvalidHyperparameter(m.to_string()));
        match &self.hyperparams {
            Hyperparams::DecisionTree(p) => {
                if p.max_depth == Some(0) {
                    return bad("decision_tree.max_depth must be positive");
                }
            }
            Hyperparams::RandomForest(p) => {
                if p.n_trees == 0 {
                    return bad("random_forest.n_trees must be positive");
                }
                if p.max_depth == Some(0) {
                    return bad("random_forest.max_depth must be positive");
                }
            }
            Hyperparams::KNeighbors(p) => {
                if p.k == 0 {
                    return bad("k_neighbors.k must be positive");
                }
            }
            Hyperparams::Mlp(p) => {
                if p.hidden_units == 0 || p.max_epochs == 0 || p.batch_size == 0 {
                    return bad("mlp hidden_units, max_epochs and batch_size must be positive");
                }
                if !(p.learning_rate > 0.0) {
                    return bad("mlp.learning_rate must be positive");
                }
            }
            Hyperparams::BernoulliNb(p) => {
                if !(p.alpha >= 0.0) {
                    return bad("bernoulli_nb.alpha must be non-negative");
                }
            }
        }
        Ok(())
    }
}

/// Row-major samples × features view.
#[derive(Debug, Clone, Copy)]
pub struct Samples<'a> {
    data: &'a [f64],
    n_samples: usize,
    n_features: usize,
}

impl<'a> Samples<'a> {
    pub fn new(data: &'a [f64], n_samples: usize, n_features: usize) -> Self {
        assert_eq!(data.len(), n_samples * n_features);
        Self {
            data,
            n_samples,
            n_features,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn get(&self, i: usize, f: usize) -> f64 {
        self.data[i * self.n_features + f]
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn as_slice(&self) -> &'a [f64] {
        self.data
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedParams {
    DecisionTree(tree::DecisionTree),
    RandomForest(forest::RandomForest),
    KNeighbors(knn::KNearest),
    Mlp(mlp::Mlp),
    BernoulliNb(naive_bayes::BernoulliNb),
}

/// A fitted classifier. Internally classes are indexed `0..classes.len()`;
/// `classes` maps those indices back to the caller's labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ClassifierSpec,
    pub classes: Vec<usize>,
    pub input_dim: usize,
    pub params: FittedParams,
}

/// Fits a classifier on `u` (features × samples) with labels `y` and returns
/// it with the wall-clock fit duration in seconds.
pub fn fit(
    spec: &ClassifierSpec,
    u: &DesignMatrix,
    y: &[usize],
) -> Result<(TrainedModel, f64), ClassifierError> {
    spec.validate()?;
    if u.n_samples() != y.len() {
        return Err(ClassifierError::LengthMismatch {
            samples: u.n_samples(),
            labels: y.len(),
        });
    }
    if y.len() < 2 {
        return Err(ClassifierError::NotEnoughSamples(y.len()));
    }
    check_finite(u)?;
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClassInput);
    }

    let start = Instant::now();
    let model = fit_inner(spec, u, y, classes);
    let elapsed = start.elapsed().as_secs_f64();
    Ok((model, elapsed))
}

fn fit_inner(spec: &ClassifierSpec, u: &DesignMatrix, y: &[usize], classes: Vec<usize>) -> TrainedModel {
    let sm = u.samples_major();
    let x = Samples::new(sm.as_slice(), u.n_samples(), u.n_features());
    let yi: Vec<usize> = y
        .iter()
        .map(|l| classes.binary_search(l).expect("label drawn from classes"))
        .collect();
    let n_classes = classes.len();
    let params = match &spec.hyperparams {
        Hyperparams::DecisionTree(p) => {
            FittedParams::DecisionTree(tree::DecisionTree::fit(x, &yi, n_classes, p))
        }
        Hyperparams::RandomForest(p) => {
            FittedParams::RandomForest(forest::RandomForest::fit(x, &yi, n_classes, p, spec.seed))
        }
        Hyperparams::KNeighbors(p) => FittedParams::KNeighbors(knn::KNearest::fit(x, &yi, n_classes, p)),
        Hyperparams::Mlp(p) => FittedParams::Mlp(mlp::Mlp::fit(x, &yi, n_classes, p, spec.seed)),
        Hyperparams::BernoulliNb(p) => {
            FittedParams::BernoulliNb(naive_bayes::BernoulliNb::fit(x, &yi, n_classes, p))
        }
    };
    TrainedModel {
        spec: spec.clone(),
        classes,
        input_dim: u.n_features(),
        params,
    }
}

/// Predicts one label per sample of `u`; returns the labels and the
/// wall-clock prediction time in seconds.
pub fn predict(model: &TrainedModel, u: &DesignMatrix) -> Result<(Vec<usize>, f64), ClassifierError> {
    if u.n_features() != model.input_dim {
        return Err(ClassifierError::DimensionMismatch {
            expected: model.input_dim,
            found: u.n_features(),
        });
    }
    let start = Instant::now();
    let sm = u.samples_major();
    let x = Samples::new(sm.as_slice(), u.n_samples(), u.n_features());
    let idx = match &model.params {
        FittedParams::DecisionTree(m) => m.predict(x),
        FittedParams::RandomForest(m) => m.predict(x),
        FittedParams::KNeighbors(m) => m.predict(x),
        FittedParams::Mlp(m) => m.predict(x),
        FittedParams::BernoulliNb(m) => m.predict(x),
    };
    let labels = idx.into_iter().map(|i| model.classes[i]).collect();
    Ok((labels, start.elapsed().as_secs_f64()))
}

fn check_finite(u: &DesignMatrix) -> Result<(), ClassifierError> {
    for f in 0..u.n_features() {
        if let Some(sample) = u.values.row(f).iter().position(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFiniteFeature { sample, feature: f });
        }
    }
    Ok(())
}

/// Index of the largest count; lowest index wins ties.
pub(crate) fn argmax_lowest<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
