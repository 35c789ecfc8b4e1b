use crate::error::{Error, Result};

/// Optimal leaf value `-G / (H + lambda)` before shrinkage.
pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> Result<f64> {
    if !(h + lambda > 0.0) {
        return Err(Error::Invalid(format!(
            "H + lambda = {} must be positive",
            h + lambda
        )));
    }
    let w = -g / (h + lambda);
    Ok(if w == 0.0 { 0.0 } else { w })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

pub(crate) struct SplitCtx<'a> {
    pub x: &'a [Vec<f64>],
    pub g: &'a [f64],
    pub h: &'a [f64],
    pub lambda: f64,
    pub gamma: f64,
    pub min_leaf: usize,
}

pub(crate) fn score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda)
}

/// Midpoint between consecutive distinct values `a < b`, nudged so that
/// `a < t <= b` holds in floating point.
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m > a && m <= b {
        m
    } else {
        b
    }
}

impl SplitCtx<'_> {
    /// Best split of the rows in `sorted`. `sorted[f]` lists the node's rows
    /// with a non-missing value of feature `f`, ascending by value; `missing[f]`
    /// lists the rest. `rows` is the node's full row set.
    pub fn best(
        &self,
        rows: &[usize],
        sorted: &[Vec<usize>],
        missing: &[Vec<usize>],
    ) -> Option<Split> {
        let n = rows.len();
        if n < 2 {
            return None;
        }
        let (gt, ht) = rows
            .iter()
            .fold((0.0, 0.0), |(a, b), &r| (a + self.g[r], b + self.h[r]));
        let parent = score(gt, ht, self.lambda);
        let mut best: Option<Split> = None;
        for (f, order) in sorted.iter().enumerate() {
            let (mut gl, mut hl) = missing[f]
                .iter()
                .fold((0.0, 0.0), |(a, b), &r| (a + self.g[r], b + self.h[r]));
            let mut nl = missing[f].len();
            for k in 0..order.len().saturating_sub(1) {
                let r = order[k];
                gl += self.g[r];
                hl += self.h[r];
                nl += 1;
                let (a, b) = (self.x[r][f], self.x[order[k + 1]][f]);
                if !(a < b) || nl < self.min_leaf || n - nl < self.min_leaf {
                    continue;
                }
                let (gr, hr) = (gt - gl, ht - hl);
                if !(hl + self.lambda > 0.0) || !(hr + self.lambda > 0.0) {
                    continue;
                }
                let gain = 0.5 * (score(gl, hl, self.lambda) + score(gr, hr, self.lambda) - parent)
                    - self.gamma;
                if best.is_none_or(|s| gain > s.gain) {
                    best = Some(Split {
                        feature: f,
                        threshold: midpoint(a, b),
                        gain,
                    });
                }
            }
        }
        best.filter(|s| s.gain > 0.0)
    }
}

/// Per-feature ascending orders of `rows` and the rows with missing values.
pub(crate) fn presort(
    x: &[Vec<f64>],
    rows: &[usize],
    n_features: usize,
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut sorted = Vec::with_capacity(n_features);
    let mut missing = Vec::with_capacity(n_features);
    // `f` indexes the inner rows, not `x`
    #[allow(clippy::needless_range_loop)]
    for f in 0..n_features {
        let (mut present, absent): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| !x[r][f].is_nan());
        present.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        sorted.push(present);
        missing.push(absent);
    }
    (sorted, missing)
}

/// Exact greedy search over every feature and every midpoint between
/// consecutive distinct values. Ties go to the lower feature index, then
/// the lower threshold; `None` when no split has positive gain.
pub fn find_best_split(
    x: &[Vec<f64>],
    g: &[f64],
    h: &[f64],
    lambda: f64,
    gamma: f64,
    min_leaf: usize,
) -> Result<Option<Split>> {
    if g.len() != x.len() || h.len() != x.len() {
        return Err(Error::Shape {
            expected: x.len(),
            actual: g.len().min(h.len()),
        });
    }
    let n_features = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != n_features) {
        return Err(Error::Invalid("feature rows have unequal lengths".into()));
    }
    let rows: Vec<usize> = (0..x.len()).collect();
    let (sorted, missing) = presort(x, &rows, n_features);
    let ctx = SplitCtx {
        x,
        g,
        h,
        lambda,
        gamma,
        min_leaf: min_leaf.max(1),
    };
    Ok(ctx.best(&rows, &sorted, &missing))
}
