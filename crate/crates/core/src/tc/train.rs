//! Backpropagation and the mini-batch Adam training loop.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{relu_in_place, softmax, DanTcModel, Dense, PROB_EPS};
use crate::corpus::{LabeledSentence, TemplateId};
use crate::error::{Error, Result};
use crate::optim::AdamState;
use crate::textproc::{tokenize, EmbeddingTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TcHyper {
    pub lr: f64,
    pub batch_size: usize,
    pub dropout: f64,
    pub max_epochs: usize,
    pub mlp_depth: usize,
    pub seed: u64,
    pub dim: usize,
    pub hidden: (usize, usize),
    pub head_width: usize,
    pub buckets: usize,
    /// Tokens seen fewer times than this share the hash buckets.
    pub min_count: usize,
    pub emb_scale: f64,
    pub max_tokens: usize,
    /// Optional per-class loss weights, indexed by template.
    pub class_weights: Option<Vec<f64>>,
}

impl Default for TcHyper {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            batch_size: 256,
            dropout: 0.4,
            max_epochs: 100,
            mlp_depth: 3,
            seed: 0,
            dim: 64,
            hidden: (64, 64),
            head_width: 64,
            buckets: crate::textproc::DEFAULT_BUCKETS,
            min_count: 2,
            emb_scale: 0.5,
            max_tokens: super::DEFAULT_MAX_TOKENS,
            class_weights: None,
        }
    }
}

impl TcHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.lr
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if self.mlp_depth == 0 || self.batch_size == 0 || self.max_tokens == 0 {
            return Err(Error::Config(
                "depth, batch size and max tokens must be positive".into(),
            ));
        }
        if let Some(w) = &self.class_weights {
            if w.len() != TemplateId::COUNT || w.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::Config(
                    "class weights need 7 non-negative values".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Gradients with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    /// Dense over every embedding row.
    pub embeddings: Vec<f64>,
    pub encoder: [Dense; 2],
    pub head: Vec<Dense>,
}

impl Gradients {
    fn zeros_like(model: &DanTcModel) -> Self {
        let z = |d: &Dense| Dense::zeros(d.n_in, d.n_out);
        Self {
            embeddings: vec![0.0; model.embeddings.weights.len()],
            encoder: [z(&model.encoder[0]), z(&model.encoder[1])],
            head: model.head.iter().map(z).collect(),
        }
    }

    /// Parameter groups in the order of [`DanTcModel::param_groups_mut`].
    pub fn groups(&self) -> Vec<&[f64]> {
        let mut g: Vec<&[f64]> = vec![&self.embeddings];
        for d in self.encoder.iter().chain(&self.head) {
            g.push(&d.w);
            g.push(&d.b);
        }
        g
    }

    fn groups_mut(&mut self) -> Vec<&mut [f64]> {
        let mut g: Vec<&mut [f64]> = vec![&mut self.embeddings];
        for d in self.encoder.iter_mut().chain(self.head.iter_mut()) {
            g.push(&mut d.w);
            g.push(&mut d.b);
        }
        g
    }
}

impl DanTcModel {
    /// Parameter groups: embeddings, then `w`, `b` of every layer in order.
    pub fn param_groups_mut(&mut self) -> Vec<&mut [f64]> {
        let mut g: Vec<&mut [f64]> = vec![&mut self.embeddings.weights];
        for d in self.encoder.iter_mut().chain(self.head.iter_mut()) {
            g.push(&mut d.w);
            g.push(&mut d.b);
        }
        g
    }

    /// Mean cross-entropy and its gradient over `examples`, dropout off.
    pub fn loss_and_gradients<S: AsRef<str>>(
        &self,
        examples: &[(Vec<S>, TemplateId)],
    ) -> Result<(f64, Gradients)> {
        let encoded = examples
            .iter()
            .map(|(toks, t)| Ok((self.rows_of(toks)?, *t)))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&(Vec<usize>, TemplateId)> = encoded.iter().collect();
        let mut grads = Gradients::zeros_like(self);
        let loss = self.accumulate(&refs, None, None::<&mut ChaCha8Rng>, &mut grads);
        Ok((loss, grads))
    }

    /// Adds the gradient of the batch-mean loss to `grads` and returns the
    /// batch-mean loss. With `rng` set, inverted dropout is applied to every
    /// head input.
    fn accumulate<R: Rng>(
        &self,
        batch: &[&(Vec<usize>, TemplateId)],
        class_weights: Option<&[f64]>,
        mut rng: Option<&mut R>,
        grads: &mut Gradients,
    ) -> f64 {
        let scale = 1.0 / batch.len() as f64;
        let keep = 1.0 - self.dropout;
        let d = self.embeddings.dim();
        let mut total = 0.0;
        let depth = self.head.len();

        for (rows, gold) in batch {
            let x0 = self.mean_of_rows(rows);
            let mut a1 = Vec::new();
            self.encoder[0].forward(&x0, &mut a1);
            let mut h1 = a1.clone();
            relu_in_place(&mut h1);
            let mut a2 = Vec::new();
            self.encoder[1].forward(&h1, &mut a2);
            let mut z = a2.clone();
            relu_in_place(&mut z);

            // inputs[l] is what head layer l saw (after dropout), masks[l]
            // the dropout multipliers, pre[l] its pre-activation output.
            let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(depth);
            let mut masks: Vec<Option<Vec<f64>>> = Vec::with_capacity(depth);
            let mut pre: Vec<Vec<f64>> = Vec::with_capacity(depth);
            let mut act = z;
            for (l, layer) in self.head.iter().enumerate() {
                let mask = match rng.as_deref_mut() {
                    Some(r) if self.dropout > 0.0 => {
                        let m: Vec<f64> = (0..act.len())
                            .map(|_| {
                                if r.gen::<f64>() < keep {
                                    1.0 / keep
                                } else {
                                    0.0
                                }
                            })
                            .collect();
                        act.iter_mut().zip(&m).for_each(|(a, k)| *a *= k);
                        Some(m)
                    }
                    _ => None,
                };
                let mut out = Vec::new();
                layer.forward(&act, &mut out);
                inputs.push(std::mem::take(&mut act));
                masks.push(mask);
                act = out.clone();
                if l + 1 < depth {
                    relu_in_place(&mut act);
                }
                pre.push(out);
            }
            let probs = softmax(&pre[depth - 1]);
            let w = class_weights.map_or(1.0, |cw| cw[gold.index()]);
            total += -w * probs[gold.index()].max(PROB_EPS).ln();

            let mut delta: Vec<f64> = probs.iter().map(|p| p * w * scale).collect();
            delta[gold.index()] -= w * scale;

            for l in (0..depth).rev() {
                let layer = &self.head[l];
                let g = &mut grads.head[l];
                let d_in = backprop_dense(layer, g, &inputs[l], &delta);
                let mut d_in = d_in;
                if let Some(m) = &masks[l] {
                    d_in.iter_mut().zip(m).for_each(|(v, k)| *v *= k);
                }
                if l > 0 {
                    for (v, p) in d_in.iter_mut().zip(&pre[l - 1]) {
                        if *p <= 0.0 {
                            *v = 0.0;
                        }
                    }
                } else {
                    for (v, p) in d_in.iter_mut().zip(&a2) {
                        if *p <= 0.0 {
                            *v = 0.0;
                        }
                    }
                }
                delta = d_in;
            }
            // delta is now d loss / d a2.
            let mut d_h1 = backprop_dense(&self.encoder[1], &mut grads.encoder[1], &h1, &delta);
            for (v, p) in d_h1.iter_mut().zip(&a1) {
                if *p <= 0.0 {
                    *v = 0.0;
                }
            }
            let d_x0 = backprop_dense(&self.encoder[0], &mut grads.encoder[0], &x0, &d_h1);
            let inv_n = 1.0 / rows.len() as f64;
            for &r in rows.iter() {
                let g = &mut grads.embeddings[r * d..(r + 1) * d];
                for (gv, dv) in g.iter_mut().zip(&d_x0) {
                    *gv += dv * inv_n;
                }
            }
        }
        total * scale
    }
}

/// Accumulates `dW += x ⊗ delta`, `db += delta` and returns `W delta`.
fn backprop_dense(layer: &Dense, g: &mut Dense, x: &[f64], delta: &[f64]) -> Vec<f64> {
    let n_out = layer.n_out;
    let mut d_in = vec![0.0; layer.n_in];
    for (gb, dv) in g.b.iter_mut().zip(delta) {
        *gb += dv;
    }
    for i in 0..layer.n_in {
        let xi = x[i];
        let wrow = &layer.w[i * n_out..(i + 1) * n_out];
        let grow = &mut g.w[i * n_out..(i + 1) * n_out];
        let mut acc = 0.0;
        for o in 0..n_out {
            grow[o] += xi * delta[o];
            acc += wrow[o] * delta[o];
        }
        d_in[i] = acc;
    }
    d_in
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub model: DanTcModel,
    /// Mean training loss of each epoch.
    pub loss_history: Vec<f64>,
}

/// Vocabulary of tokens seen at least `min_count` times, sorted.
fn build_vocab(tokenized: &[Vec<String>], min_count: usize) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for toks in tokenized {
        for t in toks {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count.max(1))
        .map(|(t, _)| t.to_string())
        .collect()
}

/// Trains a classifier from scratch. Deterministic for a fixed seed: the
/// shuffle order and dropout masks all come from one seeded generator.
pub fn tc_train(dataset: &[LabeledSentence], hyper: &TcHyper) -> Result<TrainOutput> {
    tc_train_with(dataset, hyper, |_| Ok(()))
}

/// Like [`tc_train`], with a hook that may overwrite the freshly initialised
/// embedding table (for example from a pretrained vector file).
pub fn tc_train_with(
    dataset: &[LabeledSentence],
    hyper: &TcHyper,
    init_embeddings: impl FnOnce(&mut EmbeddingTable) -> Result<()>,
) -> Result<TrainOutput> {
    hyper.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let tokenized: Vec<Vec<String>> = dataset.iter().map(|s| tokenize(&s.text)).collect();
    if let Some(i) = tokenized.iter().position(Vec::is_empty) {
        return Err(Error::Invalid(format!(
            "training sentence {i} has no tokens"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let vocab = build_vocab(&tokenized, hyper.min_count);
    let mut emb =
        EmbeddingTable::random(vocab, hyper.dim, hyper.buckets, hyper.emb_scale, &mut rng)?;
    init_embeddings(&mut emb)?;
    let mut model = DanTcModel::random(
        emb,
        hyper.hidden,
        hyper.head_width,
        hyper.mlp_depth,
        hyper.dropout,
        &mut rng,
    )?;
    model.max_tokens = hyper.max_tokens;

    let examples: Vec<(Vec<usize>, TemplateId)> = tokenized
        .iter()
        .zip(dataset)
        .map(|(toks, s)| Ok((model.rows_of(toks)?, s.template)))
        .collect::<Result<_>>()?;

    let mut grads = Gradients::zeros_like(&model);
    let sizes: Vec<usize> = grads.groups().iter().map(|g| g.len()).collect();
    let mut adam = AdamState::new(&sizes);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut loss_history = Vec::with_capacity(hyper.max_epochs);
    let class_weights = hyper.class_weights.as_deref();

    for _ in 0..hyper.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(hyper.batch_size) {
            for g in grads.groups_mut() {
                g.fill(0.0);
            }
            let batch: Vec<&(Vec<usize>, TemplateId)> =
                chunk.iter().map(|&i| &examples[i]).collect();
            let loss = model.accumulate(&batch, class_weights, Some(&mut rng), &mut grads);
            epoch_loss += loss * batch.len() as f64;
            let g = grads.groups();
            adam.step(&mut model.param_groups_mut(), &g, hyper.lr)?;
        }
        loss_history.push(epoch_loss / examples.len() as f64);
    }
    Ok(TrainOutput {
        model,
        loss_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> Vec<LabeledSentence> {
        let keys = [
            "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf",
        ];
        let fill = ["the", "role", "team", "we", "you"];
        (0..20)
            .map(|i| {
                let t = TemplateId::from_index(i % 7).unwrap();
                LabeledSentence {
                    text: format!("{} {} {}", fill[i % 5], keys[t.index()], fill[(i + 2) % 5]),
                    template: t,
                }
            })
            .collect()
    }

    fn small_hyper() -> TcHyper {
        TcHyper {
            dim: 16,
            hidden: (16, 16),
            head_width: 16,
            buckets: 64,
            min_count: 1,
            batch_size: 8,
            lr: 1e-2,
            seed: 11,
            ..TcHyper::default()
        }
    }

    #[test]
    fn separable_set_is_learned() {
        let data = separable();
        let out = tc_train(&data, &small_hyper()).unwrap();
        let correct = data
            .iter()
            .filter(|s| out.model.predict(&s.text).unwrap().template == s.template)
            .count();
        assert_eq!(correct, data.len());
        assert_eq!(out.loss_history.len(), 100);
        assert!(out.loss_history.last().unwrap() < &out.loss_history[0]);
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable();
        let mut h = small_hyper();
        h.max_epochs = 5;
        let a = tc_train(&data, &h).unwrap();
        let b = tc_train(&data, &h).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.loss_history, b.loss_history);
    }

    #[test]
    fn empty_dataset_and_bad_hyper() {
        assert!(matches!(
            tc_train(&[], &TcHyper::default()),
            Err(Error::EmptyDataset)
        ));
        let data = separable();
        let bad = TcHyper {
            lr: 0.0,
            ..small_hyper()
        };
        assert!(tc_train(&data, &bad).is_err());
        let bad = TcHyper {
            dropout: 1.0,
            ..small_hyper()
        };
        assert!(tc_train(&data, &bad).is_err());
        let bad = TcHyper {
            mlp_depth: 0,
            ..small_hyper()
        };
        assert!(tc_train(&data, &bad).is_err());
    }

    #[test]
    fn class_weights_scale_the_loss() {
        let data = separable();
        let mut h = small_hyper();
        h.max_epochs = 1;
        h.dropout = 0.0;
        h.lr = 1e-12;
        let base = tc_train(&data, &h).unwrap().loss_history[0];
        h.class_weights = Some(vec![2.0; 7]);
        let doubled = tc_train(&data, &h).unwrap().loss_history[0];
        assert!((doubled - 2.0 * base).abs() < 1e-9 * base.max(1.0));
    }
}

#[cfg(test)]
mod gradcheck {
    use super::*;
    use crate::textproc::EmbeddingTable;

    /// Central differences over every parameter, relative error
    /// `|a - n| / max(|a| + |n|, 1e-5)`.
    fn max_rel_error(model: &DanTcModel, examples: &[(Vec<String>, TemplateId)]) -> f64 {
        let (_, grads) = model.loss_and_gradients(examples).unwrap();
        let analytic: Vec<Vec<f64>> = grads.groups().iter().map(|g| g.to_vec()).collect();
        let mut worst: f64 = 0.0;
        let h = 1e-6;
        let mut m = model.clone();
        for (gi, group) in analytic.iter().enumerate() {
            for (k, &a) in group.iter().enumerate() {
                let orig = m.param_groups_mut()[gi][k];
                m.param_groups_mut()[gi][k] = orig + h;
                let up = m.loss_and_gradients(examples).unwrap().0;
                m.param_groups_mut()[gi][k] = orig - h;
                let down = m.loss_and_gradients(examples).unwrap().0;
                m.param_groups_mut()[gi][k] = orig;
                let numeric = (up - down) / (2.0 * h);
                let err = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-5);
                worst = worst.max(err);
            }
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let vocab: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let emb = EmbeddingTable::random(vocab, 5, 3, 1.0, &mut rng).unwrap();
        let model = DanTcModel::random(emb, (6, 5), 4, 3, 0.4, &mut rng).unwrap();
        let ex: Vec<(Vec<String>, TemplateId)> = vec![
            (vec!["a".into(), "b".into(), "zz".into()], TemplateId::Tools),
            (vec!["c".into(), "c".into()], TemplateId::Null),
            (
                vec!["d".into(), "q".into(), "a".into(), "b".into()],
                TemplateId::Language,
            ),
        ];
        let err = max_rel_error(&model, &ex);
        assert!(err < 1e-4, "max relative error {err}");
    }
}
