//! End-to-end question generation: split the posting into sentences,
//! classify each, extract parameters, merge candidates and rank them.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::{JobPosting, ScreeningQuestion, TemplateId};
use crate::error::{Error, Result};
use crate::param::ParamExtractor;
pub use crate::ranker::RankedQuestion;
use crate::ranker::{assign_tc_ranks, rank_questions, Candidate, QuestionRanker};
use crate::tc::DanTcModel;
use crate::textproc::{split_sentences, tokenize};

pub const DEFAULT_K: usize = 5;

/// Everything needed to turn a posting into ranked questions.
#[derive(Debug, Clone)]
pub struct SqgModels {
    pub tc: DanTcModel,
    pub extractor: ParamExtractor,
    pub ranker: QuestionRanker,
    pub k: usize,
    /// A sentence yields candidates only when its top template's
    /// probability exceeds NULL's by at least this much.
    pub null_margin: f64,
}

impl SqgModels {
    pub fn new(tc: DanTcModel, extractor: ParamExtractor, ranker: QuestionRanker) -> Result<Self> {
        let m = Self {
            tc,
            extractor,
            ranker,
            k: DEFAULT_K,
            null_margin: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.tc.validate()?;
        self.extractor.scorer.validate()?;
        self.ranker.validate()?;
        if !(self.null_margin >= 0.0) {
            return Err(Error::Config("null margin must be non-negative".into()));
        }
        Ok(())
    }
}

/// Candidate questions of a posting before ranking: per sentence, the
/// classifier's non-NULL template expanded by extracted parameters, merged
/// across sentences keeping the highest classifier score per question.
pub fn extract_candidates(job: &JobPosting, models: &SqgModels) -> Result<Vec<Candidate>> {
    candidates_with(job, &models.tc, &models.extractor, models.null_margin)
}

/// [`extract_candidates`] from individual components, for use before a
/// ranker exists.
pub fn candidates_with(
    job: &JobPosting,
    tc: &DanTcModel,
    extractor: &ParamExtractor,
    null_margin: f64,
) -> Result<Vec<Candidate>> {
    let mut merged: BTreeMap<ScreeningQuestion, Candidate> = BTreeMap::new();
    let mut push = |c: Candidate| match merged.get_mut(&c.question) {
        Some(old) if c.tc_score > old.tc_score => *old = c,
        Some(_) => {}
        None => {
            merged.insert(c.question.clone(), c);
        }
    };
    for sentence in split_sentences(&job.body) {
        let tokens = tokenize(&sentence);
        if tokens.is_empty() {
            continue;
        }
        let pred = tc.predict_tokens(&tokens)?;
        let t = pred.template;
        if t == TemplateId::Null
            || pred.confidence() - pred.probs[TemplateId::Null.index()] < null_margin
        {
            continue;
        }
        if t.takes_parameter() {
            for p in extractor.extract(&tokens, t, &tc.embeddings)? {
                push(Candidate {
                    question: ScreeningQuestion {
                        template: t,
                        parameter: Some(p.entity_id),
                    },
                    tc_score: pred.confidence(),
                    tc_rank: 0,
                    linker_score: p.score,
                });
            }
        } else {
            push(Candidate {
                question: ScreeningQuestion {
                    template: t,
                    parameter: None,
                },
                tc_score: pred.confidence(),
                tc_rank: 0,
                linker_score: 1.0,
            });
        }
    }
    let mut cands: Vec<Candidate> = merged.into_values().collect();
    assign_tc_ranks(&mut cands);
    Ok(cands)
}

/// Top-`models.k` questions for a posting.
pub fn generate_questions(job: &JobPosting, models: &SqgModels) -> Result<Vec<RankedQuestion>> {
    let cands = extract_candidates(job, models)?;
    rank_questions(job, &cands, &models.ranker, models.k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub samples: usize,
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Wall-clock classifier time per sentence (tokenization included), on the
/// calling thread, sentences visited in order `repetitions` times.
pub fn measure_latency(
    tc: &DanTcModel,
    sentences: &[String],
    repetitions: usize,
) -> Result<LatencyStats> {
    if sentences.is_empty() || repetitions == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut samples = Vec::with_capacity(sentences.len() * repetitions);
    for _ in 0..repetitions {
        for s in sentences {
            let start = Instant::now();
            let tokens = tokenize(s);
            let out = if tokens.is_empty() {
                None
            } else {
                Some(tc.predict_tokens(&tokens)?)
            };
            std::hint::black_box(out);
            samples.push(start.elapsed().as_secs_f64() * 1e3);
        }
    }
    let mean_ms = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.sort_by(f64::total_cmp);
    Ok(LatencyStats {
        samples: samples.len(),
        mean_ms,
        p50_ms: percentile(&samples, 0.5),
        p95_ms: percentile(&samples, 0.95),
    })
}
