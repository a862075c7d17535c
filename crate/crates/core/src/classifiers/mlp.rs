//! Single-hidden-layer perceptron: ReLU hidden units, softmax output,
//! cross-entropy loss with a small L2 penalty, trained by minibatch Adam.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_lowest, Samples};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden_units: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    /// L2 penalty on the weights (not the biases).
    pub alpha: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden_units: 200,
            max_epochs: 100,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 200,
            alpha: 1e-4,
        }
    }
}

/// Parameters live in one flat buffer laid out as `[W1 | b1 | W2 | b2]`,
/// with `W1` of shape inputs × hidden and `W2` hidden × outputs, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
    pub params: Vec<f64>,
    /// Mean training loss over the last epoch.
    pub final_loss: Option<f64>,
}

struct Layout {
    w1: std::ops::Range<usize>,
    b1: std::ops::Range<usize>,
    w2: std::ops::Range<usize>,
    b2: std::ops::Range<usize>,
}

impl Mlp {
    fn layout(&self) -> Layout {
        let w1 = 0..self.n_inputs * self.n_hidden;
        let b1 = w1.end..w1.end + self.n_hidden;
        let w2 = b1.end..b1.end + self.n_hidden * self.n_outputs;
        let b2 = w2.end..w2.end + self.n_outputs;
        Layout { w1, b1, w2, b2 }
    }

    pub fn n_params(n_inputs: usize, n_hidden: usize, n_outputs: usize) -> usize {
        n_inputs * n_hidden + n_hidden + n_hidden * n_outputs + n_outputs
    }

    /// Uniform init in `±sqrt(6 / (fan_in + fan_out))` per layer, biases included.
    pub fn init(n_inputs: usize, n_hidden: usize, n_outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut m = Mlp {
            n_inputs,
            n_hidden,
            n_outputs,
            params: vec![0.0; Self::n_params(n_inputs, n_hidden, n_outputs)],
            final_loss: None,
        };
        let l = m.layout();
        let b_in = (6.0 / (n_inputs + n_hidden) as f64).sqrt();
        let b_out = (6.0 / (n_hidden + n_outputs) as f64).sqrt();
        for r in [l.w1, l.b1] {
            for v in &mut m.params[r] {
                *v = rng.random_range(-b_in..b_in);
            }
        }
        for r in [l.w2, l.b2] {
            for v in &mut m.params[r] {
                *v = rng.random_range(-b_out..b_out);
            }
        }
        m
    }

    pub fn fit(x: Samples<'_>, y: &[usize], n_classes: usize, p: &MlpParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Mlp::init(x.n_features(), p.hidden_units, n_classes, &mut rng);
        let n = x.n_samples();
        let batch = p.batch_size.min(n);
        let np = model.params.len();
        let mut m1 = vec![0.0; np];
        let mut m2 = vec![0.0; np];
        let mut grad = vec![0.0; np];
        let mut order: Vec<usize> = (0..n).collect();
        let mut xb = Vec::with_capacity(batch * x.n_features());
        let mut yb = Vec::with_capacity(batch);
        let mut step = 0i32;

        for _ in 0..p.max_epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(batch) {
                xb.clear();
                yb.clear();
                for &i in chunk {
                    xb.extend_from_slice(x.row(i));
                    yb.push(y[i]);
                }
                let bx = Samples::new(&xb, chunk.len(), x.n_features());
                let loss = model.loss_and_gradient(bx, &yb, p.alpha, &mut grad);
                epoch_loss += loss * chunk.len() as f64;

                step += 1;
                let lr = p.learning_rate * (1.0 - p.beta2.powi(step)).sqrt() / (1.0 - p.beta1.powi(step));
                for (((w, g), m), v) in model.params.iter_mut().zip(&grad).zip(&mut m1).zip(&mut m2) {
                    *m = p.beta1 * *m + (1.0 - p.beta1) * g;
                    *v = p.beta2 * *v + (1.0 - p.beta2) * g * g;
                    *w -= lr * *m / (v.sqrt() + p.epsilon);
                }
            }
            model.final_loss = Some(epoch_loss / n as f64);
        }
        model
    }

    /// Hidden activations (batch × hidden) and logits (batch × outputs).
    fn forward(&self, x: Samples<'_>) -> (Vec<f64>, Vec<f64>) {
        let l = self.layout();
        let (w1, b1) = (&self.params[l.w1], &self.params[l.b1]);
        let (w2, b2) = (&self.params[l.w2], &self.params[l.b2]);
        let (h, o) = (self.n_hidden, self.n_outputs);
        let bsz = x.n_samples();
        let mut hidden = vec![0.0; bsz * h];
        let mut logits = vec![0.0; bsz * o];
        for i in 0..bsz {
            let hr = &mut hidden[i * h..(i + 1) * h];
            hr.copy_from_slice(b1);
            for (k, &xv) in x.row(i).iter().enumerate() {
                if xv == 0.0 {
                    continue;
                }
                for (hv, &w) in hr.iter_mut().zip(&w1[k * h..(k + 1) * h]) {
                    *hv += xv * w;
                }
            }
            hr.iter_mut().for_each(|v| *v = v.max(0.0));
            let zr = &mut logits[i * o..(i + 1) * o];
            zr.copy_from_slice(b2);
            for (j, &hv) in hr.iter().enumerate() {
                if hv == 0.0 {
                    continue;
                }
                for (z, &w) in zr.iter_mut().zip(&w2[j * o..(j + 1) * o]) {
                    *z += hv * w;
                }
            }
        }
        (hidden, logits)
    }

    /// Mean cross-entropy over the batch plus `alpha/(2B)·‖W‖²`; writes the
    /// gradient w.r.t. the flat parameter vector into `grad`.
    pub fn loss_and_gradient(&self, x: Samples<'_>, y: &[usize], alpha: f64, grad: &mut [f64]) -> f64 {
        let l = self.layout();
        let (h, o) = (self.n_hidden, self.n_outputs);
        let bsz = x.n_samples();
        let inv_b = 1.0 / bsz as f64;
        let (hidden, mut delta) = self.forward(x);

        let mut loss = 0.0;
        for (i, &label) in y.iter().enumerate() {
            let z = &mut delta[i * o..(i + 1) * o];
            let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = z.iter().map(|v| (v - max).exp()).sum();
            let lse = max + sum.ln();
            loss -= z[label] - lse;
            // softmax - onehot, scaled by 1/B
            for (c, v) in z.iter_mut().enumerate() {
                let p = (*v - lse).exp();
                *v = (p - if c == label { 1.0 } else { 0.0 }) * inv_b;
            }
        }
        let w1 = &self.params[l.w1.clone()];
        let w2 = &self.params[l.w2.clone()];
        let sq: f64 = w1.iter().chain(w2).map(|v| v * v).sum();
        loss = loss * inv_b + 0.5 * alpha * sq * inv_b;

        grad.iter_mut().for_each(|g| *g = 0.0);
        let (gw1, rest) = grad.split_at_mut(l.b1.start);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(h * o);

        let mut dh = vec![0.0; h];
        for i in 0..bsz {
            let d2 = &delta[i * o..(i + 1) * o];
            let hr = &hidden[i * h..(i + 1) * h];
            for (j, &hv) in hr.iter().enumerate() {
                let row = &mut gw2[j * o..(j + 1) * o];
                if hv != 0.0 {
                    for (g, &d) in row.iter_mut().zip(d2) {
                        *g += hv * d;
                    }
                }
                // back through W2 and the ReLU gate
                dh[j] = if hv > 0.0 {
                    w2[j * o..(j + 1) * o].iter().zip(d2).map(|(w, d)| w * d).sum()
                } else {
                    0.0
                };
            }
            for (g, &d) in gb2.iter_mut().zip(d2) {
                *g += d;
            }
            for (k, &xv) in x.row(i).iter().enumerate() {
                if xv == 0.0 {
                    continue;
                }
                for (g, &d) in gw1[k * h..(k + 1) * h].iter_mut().zip(&dh) {
                    *g += xv * d;
                }
            }
            for (g, &d) in gb1.iter_mut().zip(&dh) {
                *g += d;
            }
        }
        for (g, &w) in gw1.iter_mut().zip(w1) {
            *g += alpha * w * inv_b;
        }
        for (g, &w) in gw2.iter_mut().zip(w2) {
            *g += alpha * w * inv_b;
        }
        loss
    }

    pub fn predict(&self, x: Samples<'_>) -> Vec<usize> {
        // score in modest chunks to bound the scratch buffers
        const CHUNK: usize = 4096;
        let mut out = Vec::with_capacity(x.n_samples());
        let n = x.n_samples();
        let f = x.n_features();
        let data = x.as_slice();
        let mut start = 0;
        while start < n {
            let end = (start + CHUNK).min(n);
            let part = Samples::new(&data[start * f..end * f], end - start, f);
            let (_, logits) = self.forward(part);
            out.extend(logits.chunks_exact(self.n_outputs).map(argmax_lowest));
            start = end;
        }
        out
    }
}
