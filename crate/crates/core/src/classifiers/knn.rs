//! Brute-force k-nearest-neighbours with uniform voting.
//!
//! Every prediction scans the whole training set; there is no spatial index.
//! Distance ties go to the lower training index and vote ties to the lower
//! class index.

use serde::{Deserialize, Serialize};

use super::{argmax_lowest, Samples};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KNearest {
    pub k: usize,
    pub n_features: usize,
    /// Training samples, row-major.
    pub train: Vec<f64>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

impl KNearest {
    pub fn fit(x: Samples<'_>, y: &[usize], n_classes: usize, params: &KnnParams) -> Self {
        Self {
            k: params.k,
            n_features: x.n_features(),
            train: x.as_slice().to_vec(),
            labels: y.to_vec(),
            n_classes,
        }
    }

    /// Indices of the nearest training samples to `q`, closest first.
    pub fn neighbors(&self, q: &[f64]) -> Vec<usize> {
        let k = self.k.min(self.labels.len());
        // (squared distance, training index), sorted ascending
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for (i, row) in self.train.chunks_exact(self.n_features).enumerate() {
            let bound = if best.len() == k { best[k - 1].0 } else { f64::INFINITY };
            let mut d = 0.0;
            for (a, b) in row.iter().zip(q) {
                let diff = a - b;
                d += diff * diff;
            }
            // equal distance never displaces an earlier index
            if d >= bound {
                continue;
            }
            let pos = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(pos, (d, i));
            best.truncate(k);
        }
        best.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict(&self, x: Samples<'_>) -> Vec<usize> {
        let mut votes = vec![0usize; self.n_classes];
        (0..x.n_samples())
            .map(|i| {
                votes.iter_mut().for_each(|v| *v = 0);
                for j in self.neighbors(x.row(i)) {
                    votes[self.labels[j]] += 1;
                }
                argmax_lowest(&votes)
            })
            .collect()
    }
}
