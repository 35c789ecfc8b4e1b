//! Linear models trained with Adam: binary logistic regression and a
//! multinomial bag-of-words baseline for template classification.
//!
//! Inputs are sparse `(index, value)` lists; dense rows convert with
//! [`dense_to_sparse`].

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledSentence, TemplateId};
use crate::error::{Error, Result};
use crate::optim::AdamState;
use crate::tc::{argmax, softmax};
use crate::textproc::tokenize;

pub type SparseRow = Vec<(usize, f64)>;

pub fn dense_to_sparse(row: &[f64]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i, *v))
        .collect()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearHyper {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// L2 penalty on weights (not the bias), per example.
    pub l2: f64,
    pub seed: u64,
}

impl Default for LinearHyper {
    fn default() -> Self {
        Self {
            lr: 1e-2,
            epochs: 50,
            batch_size: 64,
            l2: 0.0,
            seed: 0,
        }
    }
}

impl LinearHyper {
    fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) || self.batch_size == 0 || !(self.l2 >= 0.0) {
            return Err(Error::Config(format!(
                "invalid linear hyper-parameters {self:?}"
            )));
        }
        Ok(())
    }
}

/// Multinomial logistic regression. Weights are row-major `[feature][class]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxRegression {
    pub n_features: usize,
    pub n_classes: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl SoftmaxRegression {
    pub fn zeros(n_features: usize, n_classes: usize) -> Self {
        Self {
            n_features,
            n_classes,
            weights: vec![0.0; n_features * n_classes],
            bias: vec![0.0; n_classes],
        }
    }

    pub fn logits(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let mut z = self.bias.clone();
        for &(i, v) in x {
            if i < self.n_features {
                let row = &self.weights[i * self.n_classes..(i + 1) * self.n_classes];
                for (zc, w) in z.iter_mut().zip(row) {
                    *zc += w * v;
                }
            }
        }
        z
    }

    pub fn predict(&self, x: &[(usize, f64)]) -> usize {
        argmax(&self.logits(x))
    }

    /// Mean cross-entropy training with Adam. Returns the per-epoch mean loss.
    pub fn fit(&mut self, xs: &[SparseRow], ys: &[usize], hyper: &LinearHyper) -> Result<Vec<f64>> {
        hyper.validate()?;
        if xs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        if let Some(&y) = ys.iter().find(|&&y| y >= self.n_classes) {
            return Err(Error::OutOfRange {
                index: y,
                len: self.n_classes,
            });
        }
        let c = self.n_classes;
        let mut adam = AdamState::new(&[self.weights.len(), c]);
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut gw = vec![0.0; self.weights.len()];
        let mut gb = vec![0.0; c];
        let mut history = Vec::with_capacity(hyper.epochs);
        for _ in 0..hyper.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for batch in order.chunks(hyper.batch_size) {
                gw.iter_mut().for_each(|g| *g = 0.0);
                gb.iter_mut().for_each(|g| *g = 0.0);
                let scale = 1.0 / batch.len() as f64;
                for &n in batch {
                    let p = softmax(&self.logits(&xs[n]));
                    total -= p[ys[n]].max(1e-12).ln();
                    for k in 0..c {
                        let d = (p[k] - if k == ys[n] { 1.0 } else { 0.0 }) * scale;
                        gb[k] += d;
                        for &(i, v) in &xs[n] {
                            if i < self.n_features {
                                gw[i * c + k] += d * v;
                            }
                        }
                    }
                }
                if hyper.l2 > 0.0 {
                    for (g, w) in gw.iter_mut().zip(&self.weights) {
                        *g += hyper.l2 * w;
                    }
                }
                adam.step(
                    &mut [&mut self.weights, &mut self.bias],
                    &[&gw, &gb],
                    hyper.lr,
                )?;
            }
            history.push(total / xs.len() as f64);
        }
        Ok(history)
    }
}

/// Binary logistic regression, `p = sigmoid(w·x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticRegression {
    pub fn zeros(n_features: usize) -> Self {
        Self {
            weights: vec![0.0; n_features],
            bias: 0.0,
        }
    }

    pub fn margin(&self, x: &[(usize, f64)]) -> f64 {
        self.bias
            + x.iter()
                .filter(|(i, _)| *i < self.weights.len())
                .map(|&(i, v)| self.weights[i] * v)
                .sum::<f64>()
    }

    pub fn margin_dense(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::Shape {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        Ok(self.bias + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn predict_proba(&self, x: &[(usize, f64)]) -> f64 {
        sigmoid(self.margin(x))
    }

    /// Mean log-loss training with Adam. Returns the per-epoch mean loss.
    pub fn fit(&mut self, xs: &[SparseRow], ys: &[bool], hyper: &LinearHyper) -> Result<Vec<f64>> {
        hyper.validate()?;
        if xs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        let n_features = self.weights.len();
        let mut adam = AdamState::new(&[n_features, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut gw = vec![0.0; n_features];
        let mut history = Vec::with_capacity(hyper.epochs);
        for _ in 0..hyper.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for batch in order.chunks(hyper.batch_size) {
                gw.iter_mut().for_each(|g| *g = 0.0);
                let mut gb = 0.0;
                let scale = 1.0 / batch.len() as f64;
                for &n in batch {
                    let p = self.predict_proba(&xs[n]);
                    let y = if ys[n] { 1.0 } else { 0.0 };
                    total -= if ys[n] {
                        p.max(1e-12).ln()
                    } else {
                        (1.0 - p).max(1e-12).ln()
                    };
                    let d = (p - y) * scale;
                    gb += d;
                    for &(i, v) in &xs[n] {
                        if i < n_features {
                            gw[i] += d * v;
                        }
                    }
                }
                if hyper.l2 > 0.0 {
                    for (g, w) in gw.iter_mut().zip(&self.weights) {
                        *g += hyper.l2 * w;
                    }
                }
                let mut b = [self.bias];
                adam.step(&mut [&mut self.weights, &mut b], &[&gw, &[gb]], hyper.lr)?;
                self.bias = b[0];
            }
            history.push(total / xs.len() as f64);
        }
        Ok(history)
    }
}

/// Bag-of-words template classifier: binary token-presence features over
/// the training vocabulary, multinomial logistic regression on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowBaseline {
    pub vocab: BTreeMap<String, usize>,
    pub model: SoftmaxRegression,
}

impl BowBaseline {
    pub fn featurize(&self, text: &str) -> SparseRow {
        let mut idx: Vec<usize> = tokenize(text)
            .iter()
            .filter_map(|t| self.vocab.get(t).copied())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|i| (i, 1.0)).collect()
    }

    pub fn train(dataset: &[LabeledSentence], hyper: &LinearHyper) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut vocab = BTreeMap::new();
        for s in dataset {
            for t in tokenize(&s.text) {
                let n = vocab.len();
                vocab.entry(t).or_insert(n);
            }
        }
        let mut out = Self {
            model: SoftmaxRegression::zeros(vocab.len(), TemplateId::COUNT),
            vocab,
        };
        let xs: Vec<SparseRow> = dataset.iter().map(|s| out.featurize(&s.text)).collect();
        let ys: Vec<usize> = dataset.iter().map(|s| s.template.index()).collect();
        out.model.fit(&xs, &ys, hyper)?;
        Ok(out)
    }

    pub fn predict(&self, text: &str) -> TemplateId {
        TemplateId::from_index(self.model.predict(&self.featurize(text)))
            .expect("model has one output per template")
    }
}
