//! CART decision tree with Gini impurity.
//!
//! Thresholds sit at midpoints between consecutive distinct values; a sample
//! goes left when `x[feature] <= threshold`. Nodes become leaves when pure,
//! when they hold fewer than 2 samples, at the depth cap, or when no feature
//! varies within the node. Among equally good splits the lowest feature index
//! wins, then the lowest threshold.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_lowest, Samples};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_classes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Parent Gini minus the size-weighted Gini of the two children.
    pub impurity_decrease: f64,
}

/// Gini impurity `1 - Σ p_c²` of a class histogram.
pub fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    1.0 - sq / (t * t)
}

fn weighted_children(left: &[usize], n_left: usize, right: &[usize], n_right: usize) -> f64 {
    let n = (n_left + n_right) as f64;
    (n_left as f64 * gini(left, n_left) + n_right as f64 * gini(right, n_right)) / n
}

/// `Σl²/n_l + Σr²/n_r` as an exact fraction; larger means purer children.
/// Comparing these in integers keeps tie-breaking free of rounding noise.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn new(left: &[usize], n_left: usize, right: &[usize], n_right: usize) -> Self {
        let sq = |c: &[usize]| c.iter().map(|&v| (v as u128) * (v as u128)).sum::<u128>();
        Purity {
            num: sq(left) * n_right as u128 + sq(right) * n_left as u128,
            den: n_left as u128 * n_right as u128,
        }
    }

    fn beats(self, other: Purity) -> bool {
        self.num * other.den > other.num * self.den
    }
}

/// Exhaustive best split of the samples `idx` over `features`, scanned in the
/// given order. Returns `None` when no listed feature varies within `idx`.
pub fn best_split(
    x: Samples<'_>,
    y: &[usize],
    n_classes: usize,
    idx: &[usize],
    features: &[usize],
) -> Option<SplitCandidate> {
    let n = idx.len();
    let mut total = vec![0usize; n_classes];
    for &i in idx {
        total[y[i]] += 1;
    }
    let parent = gini(&total, n);

    let mut best: Option<(Purity, SplitCandidate)> = None;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut left = vec![0usize; n_classes];
    let mut right = vec![0usize; n_classes];
    for &f in features {
        sorted.clear();
        sorted.extend(idx.iter().map(|&i| (x.get(i, f), y[i])));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted[0].0 == sorted[n - 1].0 {
            continue;
        }
        left.iter_mut().for_each(|c| *c = 0);
        right.copy_from_slice(&total);
        for pos in 0..n - 1 {
            let (v, label) = sorted[pos];
            left[label] += 1;
            right[label] -= 1;
            let next = sorted[pos + 1].0;
            if next <= v {
                continue;
            }
            let purity = Purity::new(&left, pos + 1, &right, n - pos - 1);
            if best.as_ref().is_none_or(|(b, _)| purity.beats(*b)) {
                let child = weighted_children(&left, pos + 1, &right, n - pos - 1);
                let mut threshold = 0.5 * (v + next);
                if threshold >= next {
                    threshold = v;
                }
                best = Some((
                    purity,
                    SplitCandidate {
                        feature: f,
                        threshold,
                        impurity_decrease: parent - child,
                    },
                ));
            }
        }
    }
    best.map(|(_, s)| s)
}

/// Per-node feature subsampling for forests.
pub(crate) struct FeatureSampler<'r> {
    pub rng: &'r mut ChaCha8Rng,
    pub max_features: usize,
}

pub(crate) fn grow(
    x: Samples<'_>,
    y: &[usize],
    n_classes: usize,
    root: Vec<usize>,
    max_depth: Option<usize>,
    mut sampler: Option<FeatureSampler<'_>>,
) -> DecisionTree {
    let all_features: Vec<usize> = (0..x.n_features()).collect();
    let mut nodes = vec![Node::Leaf { class: 0 }];
    let mut stack = vec![(0usize, root, 0usize)];
    let mut counts = vec![0usize; n_classes];

    while let Some((slot, idx, depth)) = stack.pop() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in &idx {
            counts[y[i]] += 1;
        }
        let majority = argmax_lowest(&counts);
        let pure = counts[majority] == idx.len();
        let capped = max_depth.is_some_and(|d| depth >= d);
        if pure || idx.len() < 2 || capped {
            nodes[slot] = Node::Leaf { class: majority };
            continue;
        }

        let split = match sampler.as_mut() {
            None => best_split(x, y, n_classes, &idx, &all_features),
            Some(s) => {
                let mut perm = all_features.clone();
                perm.shuffle(s.rng);
                let m = s.max_features.min(perm.len());
                let mut first: Vec<usize> = perm[..m].to_vec();
                first.sort_unstable();
                best_split(x, y, n_classes, &idx, &first).or_else(|| {
                    perm[m..]
                        .iter()
                        .find_map(|&f| best_split(x, y, n_classes, &idx, &[f]))
                })
            }
        };
        let Some(split) = split else {
            nodes[slot] = Node::Leaf { class: majority };
            continue;
        };

        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| x.get(i, split.feature) <= split.threshold);
        let left = nodes.len();
        nodes.push(Node::Leaf { class: 0 });
        let right = nodes.len();
        nodes.push(Node::Leaf { class: 0 });
        nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        stack.push((right, r, depth + 1));
        stack.push((left, l, depth + 1));
    }
    DecisionTree { nodes, n_classes }
}

impl DecisionTree {
    pub fn fit(x: Samples<'_>, y: &[usize], n_classes: usize, params: &TreeParams) -> Self {
        grow(x, y, n_classes, (0..x.n_samples()).collect(), params.max_depth, None)
    }

    #[inline]
    pub fn predict_one(&self, sample: &[f64]) -> usize {
        let mut node = 0;
        loop {
            match self.nodes[node] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if sample[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, x: Samples<'_>) -> Vec<usize> {
        (0..x.n_samples()).map(|i| self.predict_one(x.row(i))).collect()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}
