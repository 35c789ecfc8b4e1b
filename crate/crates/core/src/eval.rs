//! Offline metrics: AUROC, AUPRC, precision/recall/NDCG at k, template
//! classification reports, and the ranking ablation harness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{FeedbackTriple, JobPosting, TemplateId};
use crate::error::{Error, Result};
use crate::gbdt::GbdtParams;
use crate::ranker::{
    build_ranking_data, train_ranker, Candidate, FeatureGroup, FeatureSchema, QuestionRanker,
};

fn check_binary(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Shape {
            expected: scores.len(),
            actual: labels.len(),
        });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    Ok((pos, labels.len() - pos))
}

/// Area under the ROC curve via the Mann–Whitney statistic; tied scores
/// count one half.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_binary(scores, labels)?;
    if pos == 0 || neg == 0 {
        return Err(Error::Invalid(
            "AUROC needs both positive and negative labels".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum over positives of (#negatives below + 0.5 * #negatives tied).
    let mut u = 0.0;
    let mut neg_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let block = &order[i..j];
        let p = block.iter().filter(|&&k| labels[k]).count();
        let n = block.len() - p;
        u += p as f64 * (neg_below as f64 + 0.5 * n as f64);
        neg_below += n;
        i = j;
    }
    Ok(u / (pos as f64 * neg as f64))
}

/// Area under the precision–recall curve with step interpolation. Tied
/// scores enter the curve together.
pub fn auprc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, _) = check_binary(scores, labels)?;
    if pos == 0 {
        return Err(Error::Invalid(
            "AUPRC needs at least one positive label".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut area, mut tp, mut seen) = (0.0, 0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let p = order[i..j].iter().filter(|&&k| labels[k]).count();
        tp += p;
        seen += j - i;
        area += (p as f64 / pos as f64) * (tp as f64 / seen as f64);
        i = j;
    }
    Ok(area)
}

/// Relevance labels of a group in ranked order: descending score, ties in
/// input order.
fn ranked(group: &[(f64, bool)]) -> Result<Vec<bool>> {
    if group.is_empty() {
        return Err(Error::Invalid("empty ranking group".into()));
    }
    let mut order: Vec<usize> = (0..group.len()).collect();
    order.sort_by(|&a, &b| group[b].0.total_cmp(&group[a].0));
    Ok(order.into_iter().map(|i| group[i].1).collect())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    Ok(())
}

pub fn precision_at_k(group: &[(f64, bool)], k: usize) -> Result<f64> {
    check_k(k)?;
    let r = ranked(group)?;
    Ok(r.iter().take(k).filter(|&&x| x).count() as f64 / k as f64)
}

/// Zero for groups without relevant items.
pub fn recall_at_k(group: &[(f64, bool)], k: usize) -> Result<f64> {
    check_k(k)?;
    let r = ranked(group)?;
    let total = r.iter().filter(|&&x| x).count();
    if total == 0 {
        return Ok(0.0);
    }
    Ok(r.iter().take(k).filter(|&&x| x).count() as f64 / total as f64)
}

fn discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

/// Binary-gain NDCG with discount `1/log2(rank + 1)` for 1-based ranks.
/// Zero for groups without relevant items.
pub fn ndcg_at_k(group: &[(f64, bool)], k: usize) -> Result<f64> {
    check_k(k)?;
    let r = ranked(group)?;
    let total = r.iter().filter(|&&x| x).count();
    if total == 0 {
        return Ok(0.0);
    }
    let dcg: f64 = r
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, &x)| x)
        .map(|(i, _)| discount(i + 1))
        .sum();
    let ideal: f64 = (1..=total.min(k)).map(discount).sum();
    Ok(dcg / ideal)
}

/// Per-job lists of `(score, relevant)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankingRun {
    pub groups: Vec<Vec<(f64, bool)>>,
}

impl RankingRun {
    fn macro_avg(&self, k: usize, f: fn(&[(f64, bool)], usize) -> Result<f64>) -> Result<f64> {
        if self.groups.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for g in &self.groups {
            total += f(g, k)?;
        }
        Ok(total / self.groups.len() as f64)
    }

    pub fn precision_at(&self, k: usize) -> Result<f64> {
        self.macro_avg(k, precision_at_k)
    }

    pub fn recall_at(&self, k: usize) -> Result<f64> {
        self.macro_avg(k, recall_at_k)
    }

    pub fn ndcg_at(&self, k: usize) -> Result<f64> {
        self.macro_avg(k, ndcg_at_k)
    }

    /// AUROC over all items pooled across groups; `None` when one class is
    /// missing.
    pub fn pooled_auroc(&self) -> Option<f64> {
        let (s, l): (Vec<f64>, Vec<bool>) = self.groups.iter().flatten().copied().unzip();
        auroc(&s, &l).ok()
    }

    pub fn report(&self) -> Result<RankingReport> {
        Ok(RankingReport {
            groups: self.groups.len(),
            auroc: self.pooled_auroc(),
            p_at_1: self.precision_at(1)?,
            p_at_3: self.precision_at(3)?,
            r_at_1: self.recall_at(1)?,
            r_at_3: self.recall_at(3)?,
            ndcg_at_1: self.ndcg_at(1)?,
            ndcg_at_3: self.ndcg_at(3)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub groups: usize,
    pub auroc: Option<f64>,
    pub p_at_1: f64,
    pub p_at_3: f64,
    pub r_at_1: f64,
    pub r_at_3: f64,
    pub ndcg_at_1: f64,
    pub ndcg_at_3: f64,
}

impl RankingReport {
    pub const HEADER: &'static str =
        "variant               auroc    p@1    p@3    r@1    r@3 ndcg@1 ndcg@3";

    pub fn row(&self, name: &str) -> String {
        let auroc = self
            .auroc
            .map_or("     -".to_string(), |a| format!("{a:.4}"));
        format!(
            "{name:<20} {auroc:>6} {:.4} {:.4} {:.4} {:.4} {:.4} {:.4}",
            self.p_at_1, self.p_at_3, self.r_at_1, self.r_at_3, self.ndcg_at_1, self.ndcg_at_3
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    /// `None` when the class was never predicted.
    pub precision: Option<f64>,
    /// `None` when the class never occurs in the gold labels.
    pub recall: Option<f64>,
    pub support: usize,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub total: usize,
    pub per_class: BTreeMap<TemplateId, ClassStats>,
}

pub fn classification_report(
    gold: &[TemplateId],
    pred: &[TemplateId],
) -> Result<ClassificationReport> {
    if gold.len() != pred.len() {
        return Err(Error::Shape {
            expected: gold.len(),
            actual: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    let mut per_class = BTreeMap::new();
    for t in TemplateId::ALL {
        let support = gold.iter().filter(|&&g| g == t).count();
        let predicted = pred.iter().filter(|&&p| p == t).count();
        if support == 0 && predicted == 0 {
            continue;
        }
        let hits = gold
            .iter()
            .zip(pred)
            .filter(|(g, p)| **g == t && **p == t)
            .count();
        per_class.insert(
            t,
            ClassStats {
                precision: (predicted > 0).then(|| hits as f64 / predicted as f64),
                recall: (support > 0).then(|| hits as f64 / support as f64),
                support,
                predicted,
            },
        );
    }
    Ok(ClassificationReport {
        accuracy: correct as f64 / gold.len() as f64,
        total: gold.len(),
        per_class,
    })
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "overall accuracy {:.4} over {} sentences",
            self.accuracy, self.total
        )?;
        writeln!(
            f,
            "{:<12} {:>9} {:>9} {:>8}",
            "template", "precision", "recall", "support"
        )?;
        let cell = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        for (t, s) in &self.per_class {
            writeln!(
                f,
                "{:<12} {:>9} {:>9} {:>8}",
                t.name(),
                cell(s.precision),
                cell(s.recall),
                s.support
            )?;
        }
        Ok(())
    }
}

/// Scores every test triple with `ranker` and groups them per job.
pub fn ranking_run(
    ranker: &QuestionRanker,
    feedback: &[FeedbackTriple],
    jobs: &[JobPosting],
    evidence: impl FnMut(&JobPosting) -> Result<Vec<Candidate>>,
) -> Result<RankingRun> {
    let data = build_ranking_data(feedback, jobs, &ranker.pmi, &ranker.schema, evidence)?;
    let mut run = RankingRun::default();
    let mut row = 0;
    for &size in &data.groups {
        let mut g = Vec::with_capacity(size);
        for _ in 0..size {
            g.push((ranker.ensemble.margin(&data.x[row])?, data.y[row] > 0.5));
            row += 1;
        }
        run.groups.push(g);
    }
    Ok(run)
}

/// Train/test material for ranking experiments.
pub struct RankingSplit<'a> {
    pub train_feedback: &'a [FeedbackTriple],
    pub train_jobs: &'a [JobPosting],
    pub test_feedback: &'a [FeedbackTriple],
    pub test_jobs: &'a [JobPosting],
}

/// Retrains the ranker without the given feature groups (same params and
/// seed) and evaluates it on the test split.
pub fn ablation_run(
    drop: &[FeatureGroup],
    split: &RankingSplit<'_>,
    schema: &FeatureSchema,
    params: &GbdtParams,
    alpha: f64,
    mut evidence: impl FnMut(&JobPosting) -> Result<Vec<Candidate>>,
) -> Result<RankingReport> {
    let schema = schema.without(drop)?;
    let ranker = train_ranker(
        split.train_feedback,
        split.train_jobs,
        &schema,
        params,
        alpha,
        &mut evidence,
    )?;
    ranking_run(&ranker, split.test_feedback, split.test_jobs, &mut evidence)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair_count_auroc(s: &[f64], l: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if l[i] && !l[j] {
                    den += 1.0;
                    if s[i] > s[j] {
                        num += 1.0;
                    } else if s[i] == s[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    #[test]
    fn auroc_examples() {
        let l = [false, false, true, true];
        assert_eq!(auroc(&[0.1, 0.2, 0.3, 0.4], &l).unwrap(), 1.0);
        assert_eq!(auroc(&[0.4, 0.3, 0.2, 0.1], &l).unwrap(), 0.0);
        assert_eq!(auroc(&[0.5; 4], &l).unwrap(), 0.5);
        assert!(auroc(&[0.1, 0.2], &[true, true]).is_err());
    }

    #[test]
    fn auprc_examples() {
        assert_eq!(auprc(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap(), 1.0);
        let n = 7;
        let s: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
        let mut l = vec![false; n];
        l[n - 1] = true;
        assert!((auprc(&s, &l).unwrap() - 1.0 / n as f64).abs() < 1e-15);
        assert!(auprc(&[0.1], &[false]).is_err());
    }

    #[test]
    fn at_k_examples() {
        let g = [(0.9, true), (0.5, false)];
        assert_eq!(precision_at_k(&g, 1).unwrap(), 1.0);
        let g = [(0.9, true), (0.5, false), (0.7, true)];
        assert_eq!(precision_at_k(&g, 3).unwrap(), 2.0 / 3.0);
        let g = [(0.9, false), (0.5, true)];
        assert!((precision_at_k(&g, 3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(recall_at_k(&g, 3).unwrap(), 1.0);
        let none = [(0.3, false), (0.2, false)];
        assert_eq!(precision_at_k(&none, 2).unwrap(), 0.0);
        assert_eq!(recall_at_k(&none, 2).unwrap(), 0.0);
        assert_eq!(ndcg_at_k(&none, 2).unwrap(), 0.0);
        assert!(precision_at_k(&[], 1).is_err());
        assert!(ndcg_at_k(&g, 0).is_err());
    }

    #[test]
    fn ndcg_closed_forms() {
        let ideal = [(3.0, true), (2.0, true), (1.0, false)];
        assert_eq!(ndcg_at_k(&ideal, 3).unwrap(), 1.0);
        let v = ndcg_at_k(&[(2.0, false), (1.0, true)], 2).unwrap();
        assert!((v - 1.0 / 3f64.log2()).abs() < 1e-12);
        assert!((v - 0.6309297535714575).abs() < 1e-12);
    }

    #[test]
    fn report_examples() {
        use TemplateId::{Education as A, Tools as B, WorkAuth as C};
        let r = classification_report(&[A, A, B], &[A, B, B]).unwrap();
        assert!((r.accuracy - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.per_class[&A].precision, Some(1.0));
        assert_eq!(r.per_class[&A].recall, Some(0.5));
        let r = classification_report(&[A, C], &[A, A]).unwrap();
        assert_eq!(r.per_class[&C].precision, None);
        assert_eq!(r.per_class[&C].recall, Some(0.0));
        let r = classification_report(&[A, B], &[A, B]).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!(r
            .per_class
            .values()
            .all(|s| s.precision == Some(1.0) && s.recall == Some(1.0)));
        assert!(classification_report(&[A], &[]).is_err());
        assert!(r.to_string().contains("overall accuracy 1.0000"));
    }

    fn labelled() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec((0i32..8).prop_map(|v| v as f64 / 4.0), n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn auroc_matches_pair_counting((s, mut l) in labelled()) {
            l[0] = true;
            l[1] = false;
            let a = auroc(&s, &l).unwrap();
            prop_assert!((a - pair_count_auroc(&s, &l)).abs() <= 1e-12);
        }

        #[test]
        fn at_k_metrics_ignore_monotone_transforms((s, l) in labelled(), k in 1usize..6) {
            let g: Vec<(f64, bool)> = s.iter().copied().zip(l.iter().copied()).collect();
            let t: Vec<(f64, bool)> = g.iter().map(|&(x, y)| (x.exp() * 3.0 + 1.0, y)).collect();
            prop_assert_eq!(ndcg_at_k(&g, k).unwrap(), ndcg_at_k(&t, k).unwrap());
            prop_assert_eq!(precision_at_k(&g, k).unwrap(), precision_at_k(&t, k).unwrap());
            prop_assert_eq!(recall_at_k(&g, k).unwrap(), recall_at_k(&t, k).unwrap());
            let n = ndcg_at_k(&g, k).unwrap();
            prop_assert!(n <= 1.0 + 1e-12);
            let ranked_labels = ranked(&g).unwrap();
            let rel = l.iter().filter(|&&x| x).count();
            let top_all = ranked_labels.iter().take(rel.min(k)).all(|&x| x);
            if rel > 0 {
                prop_assert_eq!(top_all, (n - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn accuracy_is_weighted_recall(pairs in proptest::collection::vec((0usize..7, 0usize..7), 1..80)) {
            let gold: Vec<TemplateId> = pairs.iter().map(|p| TemplateId::from_index(p.0).unwrap()).collect();
            let pred: Vec<TemplateId> = pairs.iter().map(|p| TemplateId::from_index(p.1).unwrap()).collect();
            let r = classification_report(&gold, &pred).unwrap();
            let weighted: f64 = r.per_class.values().filter_map(|s| s.recall.map(|x| x * s.support as f64)).sum::<f64>() / gold.len() as f64;
            prop_assert!((weighted - r.accuracy).abs() < 1e-12);
        }
    }
}
