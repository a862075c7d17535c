//! Bagged CART trees with per-node feature subsampling and hard majority vote.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, DecisionTree, FeatureSampler};
use super::{argmax_lowest, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(K)))` candidates per split.
    Sqrt,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(5),
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

impl RandomForest {
    /// Tree `t` draws from its own ChaCha stream `t` of `seed`, so the forest
    /// does not depend on the order trees are built in.
    pub fn fit(
        x: Samples<'_>,
        y: &[usize],
        n_classes: usize,
        params: &ForestParams,
        seed: u64,
    ) -> Self {
        let n = x.n_samples();
        let k = x.n_features();
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let idx: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let sampler = match params.max_features {
                    MaxFeatures::All => None,
                    MaxFeatures::Sqrt => Some(FeatureSampler {
                        rng: &mut rng,
                        max_features: ((k as f64).sqrt().floor() as usize).max(1),
                    }),
                };
                grow(x, y, n_classes, idx, params.max_depth, sampler)
            })
            .collect();
        Self { trees, n_classes }
    }

    pub fn predict(&self, x: Samples<'_>) -> Vec<usize> {
        let mut votes = vec![0usize; self.n_classes];
        (0..x.n_samples())
            .map(|i| {
                votes.iter_mut().for_each(|v| *v = 0);
                let row = x.row(i);
                for t in &self.trees {
                    votes[t.predict_one(row)] += 1;
                }
                argmax_lowest(&votes)
            })
            .collect()
    }
}
