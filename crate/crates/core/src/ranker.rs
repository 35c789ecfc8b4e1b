//! Question ranking: PMI interaction features, feature assembly and top-k
//! ordering with a boosted-tree scorer.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{dedup_feedback, FeedbackTriple, JobPosting, ScreeningQuestion, TemplateId};
use crate::error::{Error, Result};
use crate::gbdt::{gbdt_train, GbdtEnsemble, GbdtParams};
use crate::linear::sigmoid;
use crate::textproc::fnv1a64;

pub const PMI_CLAMP: f64 = 20.0;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const TEMPLATE_FIELD: &str = "template";
pub const PARAMETER_FIELD: &str = "parameter";
/// Event value used for parameter-free questions.
pub const NO_PARAMETER: &str = "-";
pub const QUESTION_FEATURES: usize = 5;
/// Job features with more values than this are hashed into this many
/// indicator columns.
pub const MAX_ONE_HOT: usize = 16;

/// Smoothed PMI from raw counts:
/// `log((joint+a)/(n+a*v)) - log((ca+a)/(n+a*va)) - log((cb+a)/(n+a*vb))`,
/// evaluated as one log of a product ratio and clamped to `[-20, 20]`.
/// Zero when a smoothed marginal probability is zero.
#[allow(clippy::too_many_arguments)]
pub fn pmi_smoothed(
    joint: f64,
    ca: f64,
    cb: f64,
    n: f64,
    alpha: f64,
    v: f64,
    va: f64,
    vb: f64,
) -> f64 {
    let num = (joint + alpha) * (n + alpha * va) * (n + alpha * vb);
    let den = (n + alpha * v) * (ca + alpha) * (cb + alpha);
    if den == 0.0 {
        return 0.0;
    }
    let r = num / den;
    if r.is_nan() {
        0.0
    } else {
        r.ln().clamp(-PMI_CLAMP, PMI_CLAMP)
    }
}

/// A categorical event: field name and value.
pub type Event = (String, String);

/// Co-occurrence counts of job-side and question-side events over accepted
/// feedback. Joint counts are keyed by the unordered event pair, so lookups
/// are symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmiTable {
    pub alpha: f64,
    pub total: u64,
    pub marginals: BTreeMap<String, BTreeMap<String, u64>>,
    #[serde(with = "pair_entries")]
    pub joint: BTreeMap<(Event, Event), u64>,
    /// Number of possible values per field, used for smoothing.
    pub supports: BTreeMap<String, usize>,
}

/// JSON object keys must be strings, so the joint map is stored as a list of
/// `[pair, count]` entries.
mod pair_entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use super::Event;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(Event, Event), u64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(Event, Event), u64>, D::Error> {
        let entries: Vec<((Event, Event), u64)> = Vec::deserialize(d)?;
        Ok(entries.into_iter().collect())
    }
}

fn ordered(a: Event, b: Event) -> (Event, Event) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PmiTable {
    pub fn new(alpha: f64, supports: BTreeMap<String, usize>) -> Self {
        Self {
            alpha,
            total: 0,
            marginals: BTreeMap::new(),
            joint: BTreeMap::new(),
            supports,
        }
    }

    /// Records one observation: every job event co-occurs with every
    /// question event.
    pub fn observe(&mut self, job_events: &[Event], question_events: &[Event]) {
        self.total += 1;
        for (f, v) in job_events.iter().chain(question_events) {
            *self
                .marginals
                .entry(f.clone())
                .or_default()
                .entry(v.clone())
                .or_default() += 1;
        }
        for a in job_events {
            for b in question_events {
                *self.joint.entry(ordered(a.clone(), b.clone())).or_default() += 1;
            }
        }
    }

    pub fn count(&self, e: &Event) -> u64 {
        self.marginals
            .get(&e.0)
            .and_then(|m| m.get(&e.1))
            .copied()
            .unwrap_or(0)
    }

    pub fn joint_count(&self, a: &Event, b: &Event) -> u64 {
        self.joint
            .get(&ordered(a.clone(), b.clone()))
            .copied()
            .unwrap_or(0)
    }

    /// Smoothing support of a field: the declared value count, else the
    /// number of values observed (at least 1).
    pub fn support(&self, field: &str) -> usize {
        self.supports
            .get(field)
            .copied()
            .unwrap_or_else(|| self.marginals.get(field).map_or(0, BTreeMap::len))
            .max(1)
    }

    /// PMI of two events; the joint support is the product of the field
    /// supports.
    pub fn pmi(&self, a: &Event, b: &Event) -> f64 {
        let (va, vb) = (self.support(&a.0) as f64, self.support(&b.0) as f64);
        pmi_smoothed(
            self.joint_count(a, b) as f64,
            self.count(a) as f64,
            self.count(b) as f64,
            self.total as f64,
            self.alpha,
            va * vb,
            va,
            vb,
        )
    }
}

/// Job-side events in schema order. Fails on a job lacking a schema feature.
pub fn job_events(job: &JobPosting, schema: &FeatureSchema) -> Result<Vec<Event>> {
    schema
        .job_features
        .iter()
        .map(|(name, _)| {
            job.job_features
                .get(name)
                .map(|v| (name.clone(), v.clone()))
                .ok_or_else(|| Error::MissingFeature(name.clone()))
        })
        .collect()
}

pub fn question_events(q: &ScreeningQuestion) -> Vec<Event> {
    vec![
        (TEMPLATE_FIELD.to_string(), q.template.name().to_string()),
        (
            PARAMETER_FIELD.to_string(),
            q.parameter
                .clone()
                .unwrap_or_else(|| NO_PARAMETER.to_string()),
        ),
    ]
}

/// Builds the table from the accepted triples in `feedback` (after
/// last-write-wins dedup).
pub fn build_pmi_table(
    feedback: &[FeedbackTriple],
    jobs: &[JobPosting],
    schema: &FeatureSchema,
    alpha: f64,
) -> Result<PmiTable> {
    let by_id: HashMap<&str, &JobPosting> = jobs.iter().map(|j| (j.id.as_str(), j)).collect();
    let mut table = PmiTable::new(alpha, schema.supports());
    for t in dedup_feedback(feedback) {
        let job = by_id
            .get(t.job_id.as_str())
            .ok_or_else(|| Error::UnknownJob(t.job_id.clone()))?;
        if t.label.is_accepted() {
            table.observe(&job_events(job, schema)?, &question_events(&t.question()));
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Job,
    Question,
    Interaction,
}

impl std::str::FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "job" => Ok(Self::Job),
            "question" => Ok(Self::Question),
            "interaction" => Ok(Self::Interaction),
            _ => Err(Error::Invalid(format!("unknown feature group {s:?}"))),
        }
    }
}

/// Column layout of ranking feature vectors: job indicators (at most 16 per
/// feature), then the five question features, then one PMI value per
/// (question field, job field).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub job_features: Vec<(String, Vec<String>)>,
    pub groups: BTreeSet<FeatureGroup>,
    pub param_buckets: u64,
    /// Number of distinct parameter ids, for PMI smoothing.
    pub parameter_support: usize,
}

impl FeatureSchema {
    pub fn new(job_features: Vec<(String, Vec<String>)>, parameter_support: usize) -> Self {
        Self {
            job_features,
            groups: [
                FeatureGroup::Job,
                FeatureGroup::Question,
                FeatureGroup::Interaction,
            ]
            .into(),
            param_buckets: 4096,
            parameter_support,
        }
    }

    pub fn without(&self, drop: &[FeatureGroup]) -> Result<Self> {
        let mut s = self.clone();
        for g in drop {
            s.groups.remove(g);
        }
        if s.arity() == 0 {
            return Err(Error::Config("feature schema has no columns left".into()));
        }
        Ok(s)
    }

    /// Indicator columns used for a job feature with `n_values` values.
    pub fn job_columns(n_values: usize) -> usize {
        n_values.min(MAX_ONE_HOT)
    }

    /// Column of `value` within its feature's indicator block, if any.
    /// Small domains are one-hot by position; larger ones are hashed.
    pub fn job_column(values: &[String], value: &str) -> Option<usize> {
        if values.len() <= MAX_ONE_HOT {
            values.iter().position(|v| v == value)
        } else {
            Some((fnv1a64(value.as_bytes()) % MAX_ONE_HOT as u64) as usize)
        }
    }

    pub fn has(&self, g: FeatureGroup) -> bool {
        self.groups.contains(&g)
    }

    pub fn supports(&self) -> BTreeMap<String, usize> {
        let mut s: BTreeMap<String, usize> = self
            .job_features
            .iter()
            .map(|(n, v)| (n.clone(), v.len()))
            .collect();
        s.insert(TEMPLATE_FIELD.into(), TemplateId::QUESTIONS.len());
        s.insert(PARAMETER_FIELD.into(), self.parameter_support + 1);
        s
    }

    pub fn arity(&self) -> usize {
        self.column_names().len()
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.has(FeatureGroup::Job) {
            for (f, values) in &self.job_features {
                if values.len() <= MAX_ONE_HOT {
                    names.extend(values.iter().map(|v| format!("job:{f}={v}")));
                } else {
                    names.extend((0..MAX_ONE_HOT).map(|b| format!("job:{f}#{b}")));
                }
            }
        }
        if self.has(FeatureGroup::Question) {
            names.extend(
                [
                    "q:template",
                    "q:parameter_hash",
                    "q:tc_score",
                    "q:tc_rank",
                    "q:linker_score",
                ]
                .map(String::from),
            );
        }
        if self.has(FeatureGroup::Interaction) {
            for q in [TEMPLATE_FIELD, PARAMETER_FIELD] {
                names.extend(
                    self.job_features
                        .iter()
                        .map(|(f, _)| format!("pmi:{q}|{f}")),
                );
            }
        }
        names
    }
}

/// A candidate question with the evidence the extractor attached to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub question: ScreeningQuestion,
    pub tc_score: f64,
    /// 1-based rank of `tc_score` among the job's candidates.
    pub tc_rank: usize,
    /// Mention scorer confidence; 1 for parameter-free templates.
    pub linker_score: f64,
}

/// Assigns `tc_rank` by descending `tc_score`, ties broken by the question
/// tie key.
pub fn assign_tc_ranks(cands: &mut [Candidate]) {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| {
        cands[b]
            .tc_score
            .total_cmp(&cands[a].tc_score)
            .then_with(|| {
                cands[a]
                    .question
                    .tie_key()
                    .cmp(&cands[b].question.tie_key())
            })
    });
    for (r, i) in order.into_iter().enumerate() {
        cands[i].tc_rank = r + 1;
    }
}

pub fn assemble_features(
    job: &JobPosting,
    cand: &Candidate,
    pmi: &PmiTable,
    schema: &FeatureSchema,
) -> Result<Vec<f64>> {
    let jev = job_events(job, schema)?;
    let mut x = Vec::with_capacity(schema.arity());
    if schema.has(FeatureGroup::Job) {
        for ((_, values), (_, v)) in schema.job_features.iter().zip(&jev) {
            let start = x.len();
            x.resize(start + FeatureSchema::job_columns(values.len()), 0.0);
            if let Some(c) = FeatureSchema::job_column(values, v) {
                x[start + c] = 1.0;
            }
        }
    }
    if schema.has(FeatureGroup::Question) {
        let q = &cand.question;
        x.push(q.template.index() as f64);
        x.push(match &q.parameter {
            Some(p) => (fnv1a64(p.as_bytes()) % schema.param_buckets.max(1)) as f64,
            None => f64::NAN,
        });
        x.push(cand.tc_score);
        x.push(cand.tc_rank as f64);
        x.push(cand.linker_score);
    }
    if schema.has(FeatureGroup::Interaction) {
        for qe in question_events(&cand.question) {
            x.extend(jev.iter().map(|je| pmi.pmi(je, &qe)));
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedQuestion {
    pub question: ScreeningQuestion,
    pub score: f64,
}

/// Scorer bundle: schema, PMI table and ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRanker {
    pub schema: FeatureSchema,
    pub pmi: PmiTable,
    pub ensemble: GbdtEnsemble,
}

impl QuestionRanker {
    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.ensemble.n_features != self.schema.arity() {
            return Err(Error::Shape {
                expected: self.schema.arity(),
                actual: self.ensemble.n_features,
            });
        }
        Ok(())
    }

    pub fn score(&self, job: &JobPosting, cand: &Candidate) -> Result<f64> {
        let x = assemble_features(job, cand, &self.pmi, &self.schema)?;
        Ok(sigmoid(self.ensemble.margin(&x)?))
    }
}

/// Descending score, then template index, then parameter id.
pub fn ranking_order(a: &RankedQuestion, b: &RankedQuestion) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.question.tie_key().cmp(&b.question.tie_key()))
}

/// Scores and orders candidates, returning at most `k`. Repeated questions
/// keep their highest score.
pub fn rank_questions(
    job: &JobPosting,
    cands: &[Candidate],
    ranker: &QuestionRanker,
    k: usize,
) -> Result<Vec<RankedQuestion>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut best: BTreeMap<&ScreeningQuestion, f64> = BTreeMap::new();
    for c in cands {
        let s = ranker.score(job, c)?;
        best.entry(&c.question)
            .and_modify(|v| *v = v.max(s))
            .or_insert(s);
    }
    let mut out: Vec<RankedQuestion> = best
        .into_iter()
        .map(|(q, score)| RankedQuestion {
            question: q.clone(),
            score,
        })
        .collect();
    out.sort_by(ranking_order);
    out.truncate(k);
    Ok(out)
}

/// Training matrix for the ranker: one row per deduplicated feedback
/// triple, grouped by job in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingData {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub groups: Vec<usize>,
    pub job_ids: Vec<String>,
}

/// Assembles features for every triple. `evidence` supplies each job's
/// candidates (with TC and linker scores); questions the extractor did not
/// produce get `tc_score = 0`, `linker_score = 0` and rank after all
/// extracted candidates.
pub fn build_ranking_data(
    feedback: &[FeedbackTriple],
    jobs: &[JobPosting],
    pmi: &PmiTable,
    schema: &FeatureSchema,
    mut evidence: impl FnMut(&JobPosting) -> Result<Vec<Candidate>>,
) -> Result<RankingData> {
    let by_id: HashMap<&str, &JobPosting> = jobs.iter().map(|j| (j.id.as_str(), j)).collect();
    let mut per_job: Vec<(&str, Vec<FeedbackTriple>)> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for t in dedup_feedback(feedback) {
        if !by_id.contains_key(t.job_id.as_str()) {
            return Err(Error::UnknownJob(t.job_id.clone()));
        }
        let i = *slot.entry(t.job_id.clone()).or_insert_with(|| {
            per_job.push((by_id[t.job_id.as_str()].id.as_str(), Vec::new()));
            per_job.len() - 1
        });
        per_job[i].1.push(t);
    }
    let mut data = RankingData {
        x: Vec::new(),
        y: Vec::new(),
        groups: Vec::new(),
        job_ids: Vec::new(),
    };
    for (job_id, triples) in per_job {
        let job = by_id[job_id];
        let cands = evidence(job)?;
        for t in &triples {
            let q = t.question();
            let cand = cands
                .iter()
                .find(|c| c.question == q)
                .cloned()
                .unwrap_or(Candidate {
                    question: q,
                    tc_score: 0.0,
                    tc_rank: cands.len() + 1,
                    linker_score: 0.0,
                });
            data.x.push(assemble_features(job, &cand, pmi, schema)?);
            data.y.push(if t.label.is_accepted() { 1.0 } else { 0.0 });
        }
        data.groups.push(triples.len());
        data.job_ids.push(job_id.to_string());
    }
    Ok(data)
}

/// Builds the PMI table from `feedback`, assembles features and fits the
/// ensemble.
pub fn train_ranker(
    feedback: &[FeedbackTriple],
    jobs: &[JobPosting],
    schema: &FeatureSchema,
    params: &GbdtParams,
    alpha: f64,
    evidence: impl FnMut(&JobPosting) -> Result<Vec<Candidate>>,
) -> Result<QuestionRanker> {
    let pmi = build_pmi_table(feedback, jobs, schema, alpha)?;
    let data = build_ranking_data(feedback, jobs, &pmi, schema, evidence)?;
    let ensemble = gbdt_train(&data.x, &data.y, Some(&data.groups), params)?;
    Ok(QuestionRanker {
        schema: schema.clone(),
        pmi,
        ensemble,
    })
}
