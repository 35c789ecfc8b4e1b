//! Synthetic corpus generator.
//!
//! Produces labelled sentences for the template classifier, mention contexts
//! for the parameter scorer, job postings, and poster feedback on the
//! questions each posting implies. Everything is drawn from one seeded
//! generator, so a fixed config always yields the same corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::banks;
use super::{
    load_dataset, read_feedback, write_dataset, FeedbackLabel, FeedbackTriple, JobPosting,
    LabeledSentence, TemplateId,
};
use crate::error::{Error, Result};
use crate::param::required_entity_type;
use crate::textproc::{EntityType, Taxonomy};

/// Probability that a poster accepts `(template, parameter)` for a job with
/// the given features. Must return a value in `[0, 1]`.
pub trait PreferenceFn: Send + Sync {
    fn accept_probability(
        &self,
        job_features: &BTreeMap<String, String>,
        template: TemplateId,
        parameter: Option<&str>,
    ) -> f64;
}

impl<F> PreferenceFn for F
where
    F: Fn(&BTreeMap<String, String>, TemplateId, Option<&str>) -> f64 + Send + Sync,
{
    fn accept_probability(
        &self,
        f: &BTreeMap<String, String>,
        t: TemplateId,
        p: Option<&str>,
    ) -> f64 {
        self(f, t, p)
    }
}

/// Acceptance driven purely by a (job feature value, template) table, with
/// `liked` / `disliked` probabilities. The table is balanced: every value
/// likes half of the question templates and, for an even number of values,
/// every template is liked by half of the values. Neither the feature nor
/// the template alone then predicts acceptance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionPreference {
    pub feature: String,
    pub liked: BTreeSet<(String, TemplateId)>,
    pub p_liked: f64,
    pub p_disliked: f64,
}

impl InteractionPreference {
    /// Values are paired at random; the first of each pair likes a random
    /// half of the templates and the second likes the complement.
    pub fn balanced(
        feature: &str,
        values: &[String],
        p_liked: f64,
        p_disliked: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05ee_d0f7_a57e);
        let mut order: Vec<&String> = values.iter().collect();
        order.shuffle(&mut rng);
        let mut liked = BTreeSet::new();
        for pair in order.chunks(2) {
            let mut ts = TemplateId::QUESTIONS.to_vec();
            ts.shuffle(&mut rng);
            let (first, second) = ts.split_at(ts.len() / 2);
            for (v, half) in pair.iter().zip([first, second]) {
                liked.extend(half.iter().map(|t| ((*v).clone(), *t)));
            }
        }
        Self {
            feature: feature.to_string(),
            liked,
            p_liked,
            p_disliked,
        }
    }

    pub fn likes(&self, value: &str, template: TemplateId) -> bool {
        self.liked.contains(&(value.to_string(), template))
    }
}

impl PreferenceFn for InteractionPreference {
    fn accept_probability(
        &self,
        f: &BTreeMap<String, String>,
        t: TemplateId,
        _p: Option<&str>,
    ) -> f64 {
        match f.get(&self.feature) {
            Some(v) if self.likes(v, t) => self.p_liked,
            _ => self.p_disliked,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub test: usize,
    pub valid: usize,
}

impl SplitCounts {
    /// 70/20/10 of `total`, remainder to train.
    pub fn ratio_70_20_10(total: usize) -> Self {
        let test = total * 2 / 10;
        let valid = total / 10;
        Self {
            train: total - test - valid,
            test,
            valid,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.test + self.valid
    }
}

#[derive(Clone)]
pub struct SynthConfig {
    pub seed: u64,
    /// Labelled sentences per template (so per class) in each split.
    pub sentences_per_template: SplitCounts,
    pub jobs: SplitCounts,
    /// Positive and negative mention examples per entity type.
    pub mentions_per_type: usize,
    pub job_schema: Vec<(String, Vec<String>)>,
    pub phrase_banks: BTreeMap<TemplateId, Vec<String>>,
    pub distractors: Vec<String>,
    pub mention_distractors: BTreeMap<EntityType, Vec<String>>,
    pub taxonomy: Taxonomy,
    pub preference: Arc<dyn PreferenceFn>,
    /// Share of NULL sentences that are negated requirement statements.
    pub polarity_share: f64,
    /// Share of the remaining NULL sentences that use an entity surface form
    /// in a non-entity sense.
    pub mention_distractor_share: f64,
    /// Distinct question templates per job, inclusive range.
    pub questions_per_job: (usize, usize),
}

impl fmt::Debug for SynthConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SynthConfig")
            .field("seed", &self.seed)
            .field("sentences_per_template", &self.sentences_per_template)
            .field("jobs", &self.jobs)
            .field("mentions_per_type", &self.mentions_per_type)
            .finish_non_exhaustive()
    }
}

impl SynthConfig {
    /// Bundled banks and taxonomy; 1,000 train, 500 test and 250 validation
    /// sentences per template, and 1,000 jobs split 70/20/10.
    pub fn with_seed(seed: u64) -> Self {
        let job_schema = banks::default_job_schema();
        let industries = job_schema[0].1.clone();
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self {
            seed,
            sentences_per_template: SplitCounts {
                train: 1000,
                test: 500,
                valid: 250,
            },
            jobs: SplitCounts::ratio_70_20_10(1000),
            mentions_per_type: 300,
            phrase_banks: TemplateId::QUESTIONS
                .iter()
                .map(|&t| (t, own(banks::template_bank(t))))
                .collect(),
            distractors: own(banks::NULL_SENTENCES),
            mention_distractors: EntityType::ALL
                .iter()
                .map(|&t| (t, own(banks::mention_distractors(t))))
                .collect(),
            taxonomy: Taxonomy::bundled(),
            preference: Arc::new(InteractionPreference::balanced(
                "industry",
                &industries,
                0.95,
                0.05,
                seed,
            )),
            job_schema,
            polarity_share: 0.75,
            mention_distractor_share: 0.3,
            questions_per_job: (3, 5),
        }
    }

    pub fn job_feature_names(&self) -> Vec<String> {
        self.job_schema.iter().map(|(n, _)| n.clone()).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.sentences_per_template.total() == 0 || self.jobs.total() == 0 {
            return Err(Error::Config(
                "sentence and job counts must be positive".into(),
            ));
        }
        for share in [self.polarity_share, self.mention_distractor_share] {
            if !(0.0..=1.0).contains(&share) {
                return Err(Error::Config(format!("share {share} outside [0, 1]")));
            }
        }
        let (lo, hi) = self.questions_per_job;
        if lo == 0 || lo > hi || hi > TemplateId::QUESTIONS.len() {
            return Err(Error::Config(format!(
                "questions_per_job {lo}..={hi} is not valid"
            )));
        }
        for t in TemplateId::QUESTIONS {
            if self.phrase_banks.get(&t).is_none_or(Vec::is_empty) {
                return Err(Error::EmptyPhraseBank(t));
            }
        }
        if self.distractors.is_empty() {
            return Err(Error::EmptyPhraseBank(TemplateId::Null));
        }
        for t in EntityType::ALL {
            if self.taxonomy.of_type(t).next().is_none() {
                return Err(Error::MissingEntityType(t.name().into()));
            }
        }
        if self.job_schema.iter().any(|(_, v)| v.is_empty()) {
            return Err(Error::Config(
                "every job feature needs at least one value".into(),
            ));
        }
        Ok(())
    }
}

/// A sentence containing one known entity mention, labelled with whether
/// the mention really refers to the entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentionExample {
    pub text: String,
    pub entity_id: String,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceSplits<T> {
    pub train: Vec<T>,
    pub test: Vec<T>,
    pub valid: Vec<T>,
}

impl<T> Default for SentenceSplits<T> {
    fn default() -> Self {
        Self {
            train: Vec::new(),
            test: Vec::new(),
            valid: Vec::new(),
        }
    }
}

impl<T> SentenceSplits<T> {
    pub fn iter_all(&self) -> impl Iterator<Item = &T> {
        self.train.iter().chain(&self.test).chain(&self.valid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusBundle {
    pub jobs: SentenceSplits<JobPosting>,
    pub sentences: SentenceSplits<LabeledSentence>,
    pub mentions: Vec<MentionExample>,
    pub feedback: Vec<FeedbackTriple>,
    pub taxonomy: Taxonomy,
    /// Job feature names with their value domains.
    pub job_schema: Vec<(String, Vec<String>)>,
}

const SPLIT_NAMES: [&str; 3] = ["train", "test", "valid"];

impl CorpusBundle {
    /// Writes `jobs_<split>.jsonl`, `sentences_<split>.jsonl`,
    /// `mentions.jsonl`, `feedback.jsonl`, `taxonomy.tsv` and
    /// `job_schema.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let jobs = [&self.jobs.train, &self.jobs.test, &self.jobs.valid];
        let sents = [
            &self.sentences.train,
            &self.sentences.test,
            &self.sentences.valid,
        ];
        for (i, name) in SPLIT_NAMES.iter().enumerate() {
            write_dataset(jobs[i], dir.join(format!("jobs_{name}.jsonl")))?;
            write_dataset(sents[i], dir.join(format!("sentences_{name}.jsonl")))?;
        }
        write_dataset(&self.mentions, dir.join("mentions.jsonl"))?;
        write_dataset(&self.feedback, dir.join("feedback.jsonl"))?;
        let tax = dir.join("taxonomy.tsv");
        std::fs::write(&tax, self.taxonomy.to_tsv()).map_err(|e| Error::io(&tax, e))?;
        let schema = dir.join("job_schema.json");
        std::fs::write(&schema, serde_json::to_string_pretty(&self.job_schema)?)
            .map_err(|e| Error::io(&schema, e))
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut jobs = SentenceSplits::default();
        let mut sentences = SentenceSplits::default();
        for name in SPLIT_NAMES {
            let j = load_dataset(dir.join(format!("jobs_{name}.jsonl")))?;
            let s = load_dataset(dir.join(format!("sentences_{name}.jsonl")))?;
            match name {
                "train" => (jobs.train, sentences.train) = (j, s),
                "test" => (jobs.test, sentences.test) = (j, s),
                _ => (jobs.valid, sentences.valid) = (j, s),
            }
        }
        Ok(Self {
            jobs,
            sentences,
            mentions: load_dataset(dir.join("mentions.jsonl"))?,
            feedback: read_feedback(dir.join("feedback.jsonl"))?,
            taxonomy: Taxonomy::load(dir.join("taxonomy.tsv"))?,
            job_schema: read_job_schema(dir.join("job_schema.json"))?,
        })
    }
}

pub fn read_job_schema(path: impl AsRef<Path>) -> Result<Vec<(String, Vec<String>)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

struct Gen<'a> {
    cfg: &'a SynthConfig,
    rng: ChaCha8Rng,
    /// Entity ids with their surface strings, per type.
    entities: BTreeMap<EntityType, Vec<(String, Vec<String>)>>,
    /// Single-token surfaces per type, for non-entity distractors.
    single_token: BTreeMap<EntityType, Vec<(String, String)>>,
}

/// A rendered sentence and the entity it mentions, if any.
struct Rendered {
    text: String,
    entity: Option<String>,
}

impl<'a> Gen<'a> {
    fn new(cfg: &'a SynthConfig) -> Self {
        let mut entities: BTreeMap<EntityType, Vec<(String, Vec<String>)>> = BTreeMap::new();
        let mut single_token: BTreeMap<EntityType, Vec<(String, String)>> = BTreeMap::new();
        for e in cfg.taxonomy.entities() {
            let surfaces: Vec<String> = e.surfaces.iter().map(|s| s.join(" ")).collect();
            for s in &e.surfaces {
                if s.len() == 1 && s[0].chars().all(char::is_alphabetic) && s[0].len() > 2 {
                    single_token
                        .entry(e.entity_type)
                        .or_default()
                        .push((e.id.clone(), s[0].clone()));
                }
            }
            entities
                .entry(e.entity_type)
                .or_default()
                .push((e.id.clone(), surfaces));
        }
        Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            entities,
            single_token,
        }
    }

    fn pick<'b, T>(&mut self, xs: &'b [T]) -> &'b T {
        &xs[self.rng.gen_range(0..xs.len())]
    }

    fn fill_common(&mut self, pattern: &str) -> String {
        let mut s = pattern.to_string();
        if s.contains("{years}") {
            let y = self.rng.gen_range(1..=10).to_string();
            s = s.replace("{years}", &y);
        }
        for (slot, bank) in [
            ("{country}", banks::COUNTRIES),
            ("{city}", banks::CITIES),
            ("{dept}", banks::DEPTS),
        ] {
            if s.contains(slot) {
                let v = *self.pick(bank);
                s = s.replace(slot, v);
            }
        }
        s
    }

    /// Fills `{entity}` with a random surface of `ty`, or of the given entity.
    fn fill_entity(
        &mut self,
        pattern: &str,
        ty: Option<EntityType>,
        entity: Option<&str>,
    ) -> Result<Rendered> {
        let mut text = self.fill_common(pattern);
        let mut chosen = None;
        if text.contains("{entity}") {
            let ty =
                ty.ok_or_else(|| Error::Config(format!("pattern {pattern:?} has an entity slot")))?;
            let pool = self
                .entities
                .get(&ty)
                .ok_or_else(|| Error::MissingEntityType(ty.name().into()))?
                .clone();
            let (id, surfaces) = match entity {
                Some(id) => pool
                    .iter()
                    .find(|(e, _)| e == id)
                    .cloned()
                    .ok_or_else(|| Error::Invalid(format!("unknown entity {id}")))?,
                None => self.pick(&pool).clone(),
            };
            let surface = self.pick(&surfaces).clone();
            text = text.replace("{entity}", &surface);
            chosen = Some(id);
        }
        Ok(Rendered {
            text,
            entity: chosen,
        })
    }

    fn decorate(&mut self, text: &str) -> String {
        let lead = *self.pick(banks::LEAD_INS);
        let mut s = text.to_string();
        if self.rng.gen_bool(0.5) {
            let mut cs = s.chars();
            if let Some(c) = cs.next() {
                s = c.to_uppercase().chain(cs).collect();
            }
        }
        if self.rng.gen_bool(0.5) {
            s.push('.');
        }
        format!("{lead}{s}")
    }

    fn template_sentence(&mut self, t: TemplateId, entity: Option<&str>) -> Result<Rendered> {
        let bank = self
            .cfg
            .phrase_banks
            .get(&t)
            .ok_or(Error::EmptyPhraseBank(t))?
            .clone();
        if bank.is_empty() {
            return Err(Error::EmptyPhraseBank(t));
        }
        let pattern = self.pick(&bank).clone();
        self.fill_entity(&pattern, required_entity_type(t), entity)
    }

    /// A requirement statement about `t`'s subject; `asks` selects whether
    /// it should produce the template (true) or NULL (false).
    fn polarity_sentence(&mut self, t: TemplateId, asks: bool) -> Result<Rendered> {
        let subject = *self.pick(banks::polarity_subjects(t));
        let (ask_words, waive_words) = banks::polarity_stances(t);
        let negated = self.rng.gen_bool(0.5);
        // asks == (stance is an asking word) XOR negated
        let stance = if asks != negated {
            *self.pick(ask_words)
        } else {
            *self.pick(waive_words)
        };
        let frame = *self.pick(banks::POLARITY_FRAMES);
        let pattern = frame
            .replace("{subject}", subject)
            .replace("{neg}", if negated { "not " } else { "" })
            .replace("{stance}", stance);
        self.fill_entity(&pattern, required_entity_type(t), None)
    }

    fn null_sentence(&mut self) -> Rendered {
        let bank = self.cfg.distractors.clone();
        let p = self.pick(&bank).clone();
        Rendered {
            text: self.fill_common(&p),
            entity: None,
        }
    }

    fn mention_distractor(&mut self, ty: EntityType) -> Result<Option<Rendered>> {
        let Some(bank) = self.cfg.mention_distractors.get(&ty).cloned() else {
            return Ok(None);
        };
        let Some(pool) = self.single_token.get(&ty).cloned() else {
            return Ok(None);
        };
        if bank.is_empty() {
            return Ok(None);
        }
        let pattern = self.pick(&bank).clone();
        let (id, surface) = self.pick(&pool).clone();
        Ok(Some(Rendered {
            text: self.fill_common(&pattern).replace("{entity}", &surface),
            entity: Some(id),
        }))
    }

    /// Labelled sentences for one split, `n` per class, in shuffled order.
    fn sentences(&mut self, n: usize) -> Result<Vec<LabeledSentence>> {
        let questions = TemplateId::QUESTIONS;
        let n_pol_null = (self.cfg.polarity_share * n as f64).round() as usize;
        // Polarity NULLs are spread round-robin over the six templates; each
        // template gets the same number of polarity sentences that ask.
        let mut pol_per_template = [0usize; TemplateId::COUNT];
        for i in 0..n_pol_null {
            pol_per_template[questions[i % questions.len()].index()] += 1;
        }
        let mut out = Vec::with_capacity(n * TemplateId::COUNT);
        for &t in &questions {
            let n_pol = pol_per_template[t.index()].min(n);
            for i in 0..n {
                let r = if i < n_pol {
                    self.polarity_sentence(t, true)?
                } else {
                    self.template_sentence(t, None)?
                };
                let text = self.decorate(&r.text);
                out.push(LabeledSentence { text, template: t });
            }
        }
        let n_rest = n - n_pol_null.min(n);
        let n_mention = (self.cfg.mention_distractor_share * n_rest as f64).round() as usize;
        for i in 0..n {
            let r = if i < n_pol_null {
                self.polarity_sentence(questions[i % questions.len()], false)?
            } else if i < n_pol_null + n_mention {
                let ty = EntityType::ALL[i % EntityType::ALL.len()];
                match self.mention_distractor(ty)? {
                    Some(r) => r,
                    None => self.null_sentence(),
                }
            } else {
                self.null_sentence()
            };
            let text = self.decorate(&r.text);
            out.push(LabeledSentence {
                text,
                template: TemplateId::Null,
            });
        }
        out.shuffle(&mut self.rng);
        Ok(out)
    }

    fn mentions(&mut self) -> Result<Vec<MentionExample>> {
        let mut out = Vec::new();
        for ty in EntityType::ALL {
            let templates: Vec<TemplateId> = TemplateId::QUESTIONS
                .iter()
                .copied()
                .filter(|&t| required_entity_type(t) == Some(ty))
                .collect();
            for _ in 0..self.cfg.mentions_per_type {
                let t = *self.pick(&templates);
                let r = if self.rng.gen_bool(0.3) {
                    let asks = self.rng.gen_bool(0.5);
                    self.polarity_sentence(t, asks)?
                } else {
                    self.template_sentence(t, None)?
                };
                if let Some(id) = r.entity {
                    out.push(MentionExample {
                        text: r.text,
                        entity_id: id,
                        label: true,
                    });
                }
                if let Some(r) = self.mention_distractor(ty)? {
                    out.push(MentionExample {
                        text: r.text,
                        entity_id: r.entity.expect("distractors carry an entity"),
                        label: false,
                    });
                }
            }
        }
        out.shuffle(&mut self.rng);
        Ok(out)
    }

    fn job(&mut self, index: usize) -> Result<(JobPosting, Vec<(TemplateId, Option<String>)>)> {
        let mut features = BTreeMap::new();
        for (name, values) in &self.cfg.job_schema {
            features.insert(name.clone(), self.pick(values).clone());
        }
        let seniority = features.get("seniority").cloned().unwrap_or_default();
        let title_group = features
            .get("title_group")
            .cloned()
            .unwrap_or_else(|| "team member".to_string());
        let title = format!("{seniority} {title_group}").trim().to_string();

        let (lo, hi) = self.cfg.questions_per_job;
        let n_q = self.rng.gen_range(lo..=hi);
        let mut templates = TemplateId::QUESTIONS.to_vec();
        templates.shuffle(&mut self.rng);
        templates.truncate(n_q);
        templates.sort();

        let mut lines = Vec::new();
        for _ in 0..self.rng.gen_range(1..=3) {
            let r = self.null_sentence();
            lines.push(
                self.decorate(&r.text)
                    .trim_start_matches(['-', '•', '*', ' '])
                    .to_string(),
            );
        }
        lines.push("Requirements:".to_string());
        let mut gold = Vec::new();
        for &t in &templates {
            let r = self.template_sentence(t, None)?;
            gold.push((t, r.entity.clone()));
            let s = self.decorate(&r.text);
            lines.push(format!("- {}", s.trim_start_matches(['-', '•', '*', ' '])));
        }
        if self.rng.gen_bool(0.3) {
            let t = *self.pick(&TemplateId::QUESTIONS);
            let r = self.polarity_sentence(t, false)?;
            lines.push(format!(
                "- {}",
                self.decorate(&r.text)
                    .trim_start_matches(['-', '•', '*', ' '])
            ));
        }
        lines.push("Benefits:".to_string());
        for _ in 0..self.rng.gen_range(1..=3) {
            let r = self.null_sentence();
            lines.push(format!(
                "- {}",
                self.decorate(&r.text)
                    .trim_start_matches(['-', '•', '*', ' '])
            ));
        }
        // Sentence punctuation keeps bullets apart even if newlines get lost.
        let body = lines
            .into_iter()
            .map(|l| {
                if l.ends_with(['.', ':']) {
                    l
                } else {
                    format!("{l}.")
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        Ok((
            JobPosting {
                id: format!("job-{index:06}"),
                title,
                body,
                job_features: features,
            },
            gold,
        ))
    }
}

/// Generates a full corpus. Fails if a question template has no phrases or
/// the taxonomy lacks an entity type a template needs.
pub fn gen_synthetic_corpus(config: &SynthConfig) -> Result<CorpusBundle> {
    config.validate()?;
    let mut g = Gen::new(config);
    let c = config.sentences_per_template;
    let sentences = SentenceSplits {
        train: g.sentences(c.train)?,
        test: g.sentences(c.test)?,
        valid: g.sentences(c.valid)?,
    };
    let mentions = g.mentions()?;

    let mut all_jobs = Vec::with_capacity(config.jobs.total());
    let mut feedback = Vec::new();
    for i in 0..config.jobs.total() {
        let (job, gold) = g.job(i)?;
        for (k, (t, p)) in gold.into_iter().enumerate() {
            let prob = config
                .preference
                .accept_probability(&job.job_features, t, p.as_deref());
            if !(0.0..=1.0).contains(&prob) {
                return Err(Error::Config(format!(
                    "preference returned {prob} outside [0, 1]"
                )));
            }
            let accepted = g.rng.gen::<f64>() < prob;
            feedback.push(FeedbackTriple {
                job_id: job.id.clone(),
                template: t,
                parameter: p,
                label: if accepted {
                    FeedbackLabel::Accepted
                } else {
                    FeedbackLabel::Rejected
                },
                timestamp: 1_600_000_000 + (i as u64) * 100 + k as u64,
            });
        }
        all_jobs.push(job);
    }
    let valid = all_jobs.split_off(config.jobs.train + config.jobs.test);
    let test = all_jobs.split_off(config.jobs.train);
    Ok(CorpusBundle {
        jobs: SentenceSplits {
            train: all_jobs,
            test,
            valid,
        },
        sentences,
        mentions,
        feedback,
        taxonomy: config.taxonomy.clone(),
        job_schema: config.job_schema.clone(),
    })
}
