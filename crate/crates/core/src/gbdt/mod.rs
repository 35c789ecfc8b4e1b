//! Gradient-boosted regression trees with second-order leaf weights.
//!
//! Trees split on `x[feature] < threshold`; missing values (NaN) go left.
//! Two objectives are supported: pointwise logistic loss and a pairwise
//! NDCG-weighted ranking loss over query groups.

mod split;
mod train;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::sigmoid;

pub use split::{find_best_split, leaf_weight, Split};
pub use train::{gbdt_train, log_loss, pairwise_gradients, pointwise_gradients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Pointwise,
    Pairwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtParams {
    pub trees: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub min_leaf: usize,
    pub base_margin: f64,
    pub objective: Objective,
    pub seed: u64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        Self {
            trees: 100,
            max_depth: 5,
            eta: 0.7,
            gamma: 0.0,
            lambda: 1.0,
            min_leaf: 1,
            base_margin: 0.0,
            objective: Objective::Pointwise,
            seed: 0,
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::Config("trees must be at least 1".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta {} outside (0, 1]", self.eta)));
        }
        if !(self.gamma >= 0.0) || !(self.lambda >= 0.0) {
            return Err(Error::Config(
                "gamma and lambda must be non-negative".into(),
            ));
        }
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        if !self.base_margin.is_finite() {
            return Err(Error::Config("base margin must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        gain: f64,
    },
    Leaf {
        weight: f64,
    },
}

/// Binary tree stored as a node array; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(weight: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { weight }],
        }
    }

    /// Leaf weight reached by `x`. `x` must be long enough for every split.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let v = x[*feature];
                    i = if v.is_nan() || v < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }

    /// Checks child links point forward, every node is reachable exactly
    /// once and all numbers are finite.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = self.nodes.get(i).ok_or(Error::OutOfRange {
                index: i,
                len: self.nodes.len(),
            })?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Format(format!("tree node {i} is reachable twice")));
            }
            match node {
                Node::Leaf { weight } if !weight.is_finite() => {
                    return Err(Error::Format(format!("leaf {i} has weight {weight}")))
                }
                Node::Leaf { .. } => {}
                Node::Split {
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    if threshold.is_nan() || *left <= i || *right <= i {
                        return Err(Error::Format(format!("split node {i} is malformed")));
                    }
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Format("tree has unreachable nodes".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtEnsemble {
    pub n_features: usize,
    pub base_margin: f64,
    pub trees: Vec<Tree>,
    /// Parameters the ensemble was trained with.
    pub params: GbdtParams,
}

impl GbdtEnsemble {
    pub fn empty(n_features: usize, params: GbdtParams) -> Self {
        Self {
            n_features,
            base_margin: params.base_margin,
            trees: Vec::new(),
            params,
        }
    }

    pub fn margin(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(self.margin_unchecked(x))
    }

    pub(crate) fn margin_unchecked(&self, x: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_margin, |m, t| m + t.eval(x))
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.margin(x)?))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for t in &self.trees {
            t.validate()?;
            if t.max_feature().is_some_and(|f| f >= self.n_features) {
                return Err(Error::Format(
                    "tree splits on a feature beyond the ensemble arity".into(),
                ));
            }
        }
        Ok(())
    }

    /// Share of total split gain per feature. Empty without splits.
    pub fn feature_importance(&self) -> BTreeMap<usize, f64> {
        let mut gains: BTreeMap<usize, f64> = BTreeMap::new();
        for t in &self.trees {
            for n in &t.nodes {
                if let Node::Split { feature, gain, .. } = n {
                    *gains.entry(*feature).or_default() += gain.max(0.0);
                }
            }
        }
        let total: f64 = gains.values().sum();
        if total <= 0.0 {
            return BTreeMap::new();
        }
        gains.values_mut().for_each(|g| *g /= total);
        gains
    }
}
