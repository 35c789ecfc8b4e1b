//! Question template classification.
//!
//! A deep averaging network: token embeddings are averaged, passed through
//! two ReLU layers to get a sentence vector, and an MLP head maps that to a
//! softmax over the seven templates.

mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::TemplateId;
use crate::error::{Error, Result};
use crate::textproc::{tokenize, EmbeddingTable};

pub use train::{tc_train, tc_train_with, Gradients, TcHyper, TrainOutput};

/// Loss clamp for `log(p)`.
pub const PROB_EPS: f64 = 1e-12;
pub const DEFAULT_MAX_TOKENS: usize = 64;

/// Fully connected layer, weights stored `[input][output]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Dense {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            w: vec![0.0; n_in * n_out],
            b: vec![0.0; n_out],
        }
    }

    /// Xavier-uniform weights, zero bias.
    pub fn xavier<R: Rng>(n_in: usize, n_out: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (n_in + n_out) as f64).sqrt();
        Self {
            n_in,
            n_out,
            w: (0..n_in * n_out)
                .map(|_| rng.gen_range(-limit..=limit))
                .collect(),
            b: vec![0.0; n_out],
        }
    }

    pub fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.b);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.w[i * self.n_out..(i + 1) * self.n_out];
            for (o, &wv) in out.iter_mut().zip(row) {
                *o += xi * wv;
            }
        }
    }

    fn check(&self) -> Result<()> {
        if self.w.len() != self.n_in * self.n_out {
            return Err(Error::Shape {
                expected: self.n_in * self.n_out,
                actual: self.w.len(),
            });
        }
        if self.b.len() != self.n_out {
            return Err(Error::Shape {
                expected: self.n_out,
                actual: self.b.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn relu_in_place(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Cross-entropy `-sum(gold_i * ln(max(pred_i, 1e-12)))`.
pub fn tc_loss(gold: &[f64], predicted: &[f64]) -> Result<f64> {
    if gold.len() != predicted.len() {
        return Err(Error::Shape {
            expected: gold.len(),
            actual: predicted.len(),
        });
    }
    let loss: f64 = gold
        .iter()
        .zip(predicted)
        .filter(|(g, _)| **g != 0.0)
        .map(|(g, p)| -g * p.max(PROB_EPS).ln())
        .sum();
    Ok(loss.max(0.0))
}

pub fn one_hot(template: TemplateId) -> [f64; TemplateId::COUNT] {
    let mut v = [0.0; TemplateId::COUNT];
    v[template.index()] = 1.0;
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DanTcModel {
    pub embeddings: EmbeddingTable,
    /// The two averaging-network layers (`W1, b1` and `W2, b2`).
    pub encoder: [Dense; 2],
    /// MLP head; the last layer emits one logit per template.
    pub head: Vec<Dense>,
    /// Train-time only.
    pub dropout: f64,
    pub max_tokens: usize,
}

/// Output of a classification: the chosen template and the full distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TcPrediction {
    pub template: TemplateId,
    pub probs: Vec<f64>,
}

impl TcPrediction {
    pub fn confidence(&self) -> f64 {
        self.probs[self.template.index()]
    }
}

impl DanTcModel {
    /// Randomly initialised model: Xavier-uniform layers, embeddings uniform
    /// in `[-emb_scale, emb_scale]`.
    pub fn random<R: Rng>(
        embeddings: EmbeddingTable,
        hidden: (usize, usize),
        head_width: usize,
        depth: usize,
        dropout: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("MLP depth must be at least 1".into()));
        }
        let d = embeddings.dim();
        let encoder = [
            Dense::xavier(d, hidden.0, rng),
            Dense::xavier(hidden.0, hidden.1, rng),
        ];
        let mut head = Vec::with_capacity(depth);
        let mut n_in = hidden.1;
        for l in 0..depth {
            let n_out = if l + 1 == depth {
                TemplateId::COUNT
            } else {
                head_width
            };
            head.push(Dense::xavier(n_in, n_out, rng));
            n_in = n_out;
        }
        let model = Self {
            embeddings,
            encoder,
            head,
            dropout,
            max_tokens: DEFAULT_MAX_TOKENS,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks that layer shapes chain and the head emits seven logits.
    pub fn validate(&self) -> Result<()> {
        let mut n = self.embeddings.dim();
        for layer in self.encoder.iter().chain(&self.head) {
            layer.check()?;
            if layer.n_in != n {
                return Err(Error::Shape {
                    expected: n,
                    actual: layer.n_in,
                });
            }
            n = layer.n_out;
        }
        if n != TemplateId::COUNT {
            return Err(Error::Shape {
                expected: TemplateId::COUNT,
                actual: n,
            });
        }
        if self.head.is_empty() {
            return Err(Error::Config("empty MLP head".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        Ok(())
    }

    pub fn sentence_dim(&self) -> usize {
        self.encoder[1].n_out
    }

    fn rows_of<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<usize>> {
        if tokens.is_empty() {
            return Err(Error::EmptySentence);
        }
        Ok(tokens
            .iter()
            .take(self.max_tokens)
            .map(|t| self.embeddings.row_of(t.as_ref()))
            .collect())
    }

    pub(crate) fn mean_of_rows(&self, rows: &[usize]) -> Vec<f64> {
        let d = self.embeddings.dim();
        let mut acc = vec![0.0; d];
        for &r in rows {
            for (a, v) in acc.iter_mut().zip(self.embeddings.row(r)) {
                *a += v;
            }
        }
        let n = rows.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    /// Sentence vector `relu(relu(mean(e) W1 + b1) W2 + b2)`.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<f64>> {
        let rows = self.rows_of(tokens)?;
        let mean = self.mean_of_rows(&rows);
        let mut h = Vec::new();
        self.encoder[0].forward(&mean, &mut h);
        relu_in_place(&mut h);
        let mut z = Vec::new();
        self.encoder[1].forward(&h, &mut z);
        relu_in_place(&mut z);
        Ok(z)
    }

    /// Head logits for a sentence vector.
    pub fn logits(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.sentence_dim() {
            return Err(Error::Shape {
                expected: self.sentence_dim(),
                actual: z.len(),
            });
        }
        let mut x = z.to_vec();
        let mut out = Vec::new();
        let last = self.head.len() - 1;
        for (l, layer) in self.head.iter().enumerate() {
            layer.forward(&x, &mut out);
            if l < last {
                relu_in_place(&mut out);
            }
            std::mem::swap(&mut x, &mut out);
        }
        Ok(x)
    }

    /// Template distribution for a sentence vector.
    pub fn forward(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(softmax(&self.logits(z)?))
    }

    pub fn predict_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<TcPrediction> {
        let z = self.encode(tokens)?;
        let probs = self.forward(&z)?;
        let template = TemplateId::from_index(argmax(&probs)).expect("seven classes");
        Ok(TcPrediction { template, probs })
    }

    pub fn predict(&self, sentence: &str) -> Result<TcPrediction> {
        self.predict_tokens(&tokenize(sentence))
    }
}
