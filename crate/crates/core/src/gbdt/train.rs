use super::split::{leaf_weight, presort, score, SplitCtx};
use super::{GbdtEnsemble, GbdtParams, Node, Objective, Tree};
use crate::error::{Error, Result};
use crate::linear::sigmoid;

/// Logistic-loss gradient `p - y` and hessian `p(1 - p)` per example.
pub fn pointwise_gradients(margins: &[f64], labels: &[f64]) -> (Vec<f64>, Vec<f64>) {
    margins
        .iter()
        .zip(labels)
        .map(|(&m, &y)| {
            let p = sigmoid(m);
            (p - y, p * (1.0 - p))
        })
        .unzip()
}

/// Mean logistic loss.
pub fn log_loss(margins: &[f64], labels: &[f64]) -> f64 {
    let total: f64 = margins
        .iter()
        .zip(labels)
        .map(|(&m, &y)| {
            // log(1 + e^m) - y m, computed stably
            let softplus = if m > 0.0 {
                m + (-m).exp().ln_1p()
            } else {
                m.exp().ln_1p()
            };
            softplus - y * m
        })
        .sum();
    total / margins.len().max(1) as f64
}

/// Pairwise lambdas within consecutive groups of the given sizes. Each
/// (relevant, irrelevant) pair pushes the two scores apart with weight
/// `|ΔNDCG| * rho`, `rho = 1 / (1 + exp(s_i - s_j))`, where `|ΔNDCG|` is
/// the change from swapping the pair in the current ranking.
pub fn pairwise_gradients(
    margins: &[f64],
    labels: &[f64],
    groups: &[usize],
) -> (Vec<f64>, Vec<f64>) {
    let mut g = vec![0.0; margins.len()];
    let mut h = vec![0.0; margins.len()];
    let mut start = 0;
    for &size in groups {
        let idx: Vec<usize> = (start..start + size).collect();
        start += size;
        let n_rel = idx.iter().filter(|&&i| labels[i] > 0.5).count();
        if n_rel == 0 || n_rel == size {
            continue;
        }
        let mut order = idx.clone();
        order.sort_by(|&a, &b| margins[b].total_cmp(&margins[a]).then(a.cmp(&b)));
        let mut disc = vec![0.0; margins.len()];
        for (pos, &i) in order.iter().enumerate() {
            disc[i] = 1.0 / ((pos + 2) as f64).log2();
        }
        let ideal: f64 = (0..n_rel).map(|k| 1.0 / ((k + 2) as f64).log2()).sum();
        for &i in idx.iter().filter(|&&i| labels[i] > 0.5) {
            for &j in idx.iter().filter(|&&j| labels[j] <= 0.5) {
                let delta = (disc[i] - disc[j]).abs() / ideal;
                let rho = sigmoid(margins[j] - margins[i]);
                let lambda = delta * rho;
                let w = delta * rho * (1.0 - rho);
                g[i] -= lambda;
                g[j] += lambda;
                h[i] += w;
                h[j] += w;
            }
        }
    }
    (g, h)
}

fn check_inputs(
    x: &[Vec<f64>],
    y: &[f64],
    groups: Option<&[usize]>,
    params: &GbdtParams,
) -> Result<usize> {
    params.validate()?;
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if y.len() != x.len() {
        return Err(Error::Shape {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let n_features = x[0].len();
    if let Some(r) = x.iter().position(|r| r.len() != n_features) {
        return Err(Error::Invalid(format!(
            "row {r} has {} features, expected {n_features}",
            x[r].len()
        )));
    }
    if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Invalid(format!(
            "label {} at row {i} is not 0 or 1",
            y[i]
        )));
    }
    if params.objective == Objective::Pairwise {
        let groups =
            groups.ok_or_else(|| Error::Invalid("pairwise objective needs query groups".into()))?;
        if groups.contains(&0) {
            return Err(Error::Invalid("empty query group".into()));
        }
        let total: usize = groups.iter().sum();
        if total != x.len() {
            return Err(Error::Shape {
                expected: x.len(),
                actual: total,
            });
        }
    }
    Ok(n_features)
}

struct Grower<'a> {
    ctx: SplitCtx<'a>,
    params: &'a GbdtParams,
    nodes: Vec<Node>,
    /// Structure score `sum G^2 / (H + lambda)` over finished leaves.
    leaf_score: f64,
    leaves: usize,
}

impl Grower<'_> {
    fn grow(
        &mut self,
        rows: &[usize],
        sorted: Vec<Vec<usize>>,
        missing: Vec<Vec<usize>>,
        depth: usize,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { weight: 0.0 });
        let split = if depth < self.params.max_depth {
            self.ctx.best(rows, &sorted, &missing)
        } else {
            None
        };
        let Some(split) = split else {
            let (g, h) = rows.iter().fold((0.0, 0.0), |(a, b), &r| {
                (a + self.ctx.g[r], b + self.ctx.h[r])
            });
            let weight = match leaf_weight(g, h, self.ctx.lambda) {
                Ok(w) => {
                    self.leaf_score += score(g, h, self.ctx.lambda);
                    let w = self.params.eta * w;
                    if w == 0.0 {
                        0.0
                    } else {
                        w
                    }
                }
                Err(_) => 0.0,
            };
            self.leaves += 1;
            self.nodes[id] = Node::Leaf { weight };
            return id;
        };
        let x = self.ctx.x;
        let goes_left = |r: usize| {
            let v = x[r][split.feature];
            v.is_nan() || v < split.threshold
        };
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| goes_left(r));
        let mut ls = Vec::with_capacity(sorted.len());
        let mut rs = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (a, b): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&r| goes_left(r));
            ls.push(a);
            rs.push(b);
        }
        let mut lm = Vec::with_capacity(missing.len());
        let mut rm = Vec::with_capacity(missing.len());
        for list in missing {
            let (a, b): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&r| goes_left(r));
            lm.push(a);
            rm.push(b);
        }
        let left = self.grow(&lrows, ls, lm, depth + 1);
        let right = self.grow(&rrows, rs, rm, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            gain: split.gain,
        };
        id
    }
}

/// Trains an ensemble. `groups` gives consecutive query-group sizes and is
/// required for the pairwise objective.
///
/// A new tree is kept only when its regularised objective improvement
/// `sum_leaves G^2 / 2(H + lambda) - gamma * leaves` is positive; otherwise
/// boosting stops, since every later round would see the same gradients.
pub fn gbdt_train(
    x: &[Vec<f64>],
    y: &[f64],
    groups: Option<&[usize]>,
    params: &GbdtParams,
) -> Result<GbdtEnsemble> {
    let n_features = check_inputs(x, y, groups, params)?;
    let mut ensemble = GbdtEnsemble::empty(n_features, params.clone());
    let rows: Vec<usize> = (0..x.len()).collect();
    let (sorted, missing) = presort(x, &rows, n_features);
    let mut margins = vec![params.base_margin; x.len()];
    for _ in 0..params.trees {
        let (g, h) = match params.objective {
            Objective::Pointwise => pointwise_gradients(&margins, y),
            Objective::Pairwise => pairwise_gradients(&margins, y, groups.expect("checked above")),
        };
        let mut grower = Grower {
            ctx: SplitCtx {
                x,
                g: &g,
                h: &h,
                lambda: params.lambda,
                gamma: params.gamma,
                min_leaf: params.min_leaf,
            },
            params,
            nodes: Vec::new(),
            leaf_score: 0.0,
            leaves: 0,
        };
        grower.grow(&rows, sorted.clone(), missing.clone(), 0);
        let improvement = 0.5 * grower.leaf_score - params.gamma * grower.leaves as f64;
        if !(improvement > 0.0) {
            break;
        }
        let tree = Tree {
            nodes: grower.nodes,
        };
        for (m, row) in margins.iter_mut().zip(x) {
            *m += tree.eval(row);
        }
        ensemble.trees.push(tree);
    }
    Ok(ensemble)
}
