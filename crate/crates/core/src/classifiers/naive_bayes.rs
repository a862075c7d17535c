//! Bernoulli naive Bayes over binarized features.

use serde::{Deserialize, Serialize};

use super::{argmax_lowest, Samples};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    /// Values strictly above this count as 1.
    pub binarize: f64,
    /// Additive (Laplace) smoothing.
    pub alpha: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        Self {
            binarize: 0.0,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliNb {
    pub binarize: f64,
    pub class_log_prior: Vec<f64>,
    /// `log P(x_f = 1 | c)`, classes × features.
    pub log_p: Vec<Vec<f64>>,
    /// `log P(x_f = 0 | c)`.
    pub log_not_p: Vec<Vec<f64>>,
}

impl BernoulliNb {
    pub fn fit(x: Samples<'_>, y: &[usize], n_classes: usize, p: &NbParams) -> Self {
        let k = x.n_features();
        let mut class_count = vec![0usize; n_classes];
        let mut ones = vec![vec![0usize; k]; n_classes];
        for (i, &c) in y.iter().enumerate() {
            class_count[c] += 1;
            for (f, &v) in x.row(i).iter().enumerate() {
                if v > p.binarize {
                    ones[c][f] += 1;
                }
            }
        }
        let n = y.len() as f64;
        let class_log_prior = class_count.iter().map(|&c| (c as f64 / n).ln()).collect();
        let mut log_p = Vec::with_capacity(n_classes);
        let mut log_not_p = Vec::with_capacity(n_classes);
        for c in 0..n_classes {
            let denom = class_count[c] as f64 + 2.0 * p.alpha;
            let probs: Vec<f64> = ones[c]
                .iter()
                .map(|&o| (o as f64 + p.alpha) / denom)
                .collect();
            log_p.push(probs.iter().map(|q| q.ln()).collect());
            log_not_p.push(probs.iter().map(|q| (1.0 - q).ln()).collect());
        }
        Self {
            binarize: p.binarize,
            class_log_prior,
            log_p,
            log_not_p,
        }
    }

    /// Unnormalized log posterior of every class for one sample.
    pub fn joint_log_likelihood(&self, sample: &[f64]) -> Vec<f64> {
        self.class_log_prior
            .iter()
            .enumerate()
            .map(|(c, prior)| {
                let mut s = *prior;
                for (f, &v) in sample.iter().enumerate() {
                    s += if v > self.binarize {
                        self.log_p[c][f]
                    } else {
                        self.log_not_p[c][f]
                    };
                }
                s
            })
            .collect()
    }

    pub fn predict(&self, x: Samples<'_>) -> Vec<usize> {
        (0..x.n_samples())
            .map(|i| argmax_lowest(&self.joint_log_likelihood(x.row(i))))
            .collect()
    }
}
