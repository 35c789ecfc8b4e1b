//! Parameter extraction: gazetteer mentions filtered by entity type and a
//! contextual logistic scorer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{MentionExample, TemplateId};
use crate::error::{Error, Result};
use crate::linear::{dense_to_sparse, sigmoid, LinearHyper, LogisticRegression};
use crate::textproc::{
    fnv1a64, tokenize, EmbeddingTable, EntityType, MentionSpan, SurfaceMatcher, Taxonomy,
};

pub const CONTEXT_WINDOW: usize = 3;
pub const CONTEXT_SLOTS: usize = 256;
/// log-frequency, 3 POS indicators, context slots, cosine.
pub const MENTION_FEATURES: usize = 1 + 3 + CONTEXT_SLOTS + 1;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Entity type a template's parameter must have, or `None` for templates
/// that take no parameter.
pub fn required_entity_type(t: TemplateId) -> Option<EntityType> {
    match t {
        TemplateId::Education => Some(EntityType::Degree),
        TemplateId::Tools => Some(EntityType::ToolSkill),
        TemplateId::Language => Some(EntityType::SpokenLanguage),
        TemplateId::Credential => Some(EntityType::Credential),
        _ => None,
    }
}

/// Template → required parameter type, over the six question templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityMatrix(BTreeMap<TemplateId, Option<EntityType>>);

impl Default for CompatibilityMatrix {
    fn default() -> Self {
        Self(
            TemplateId::QUESTIONS
                .iter()
                .map(|&t| (t, required_entity_type(t)))
                .collect(),
        )
    }
}

impl CompatibilityMatrix {
    /// `None` for NULL, `Some(None)` for parameter-free templates.
    pub fn get(&self, t: TemplateId) -> Option<Option<EntityType>> {
        self.0.get(&t).copied()
    }

    pub fn is_compatible(&self, t: TemplateId, ty: EntityType) -> bool {
        self.get(t) == Some(Some(ty))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarsePos {
    Noun,
    Verb,
    Other,
}

const FUNCTION_WORDS: &[&str] = &[
    "a", "an", "the", "and", "or", "of", "in", "on", "at", "to", "for", "with", "by", "from", "as",
    "is", "are", "be", "was", "were", "our", "your", "you", "we", "it", "this", "that", "all",
    "any", "not", "no", "who", "will", "must", "can", "should", "may", "per", "into", "than",
    "via",
];
const VERBS: &[&str] = &[
    "have", "has", "had", "hold", "holds", "speak", "speaks", "use", "uses", "write", "writes",
    "provide", "provides", "offer", "offers", "require", "requires", "need", "needs", "sell",
    "sells", "serve", "serves", "call", "visit", "meet", "meets", "work", "works", "know", "own",
    "ship", "build", "maintain",
];

/// Lexicon and suffix heuristics; numbers and function words are `Other`.
pub fn coarse_pos(token: &str) -> CoarsePos {
    if token.is_empty()
        || FUNCTION_WORDS.contains(&token)
        || token.chars().next().is_some_and(|c| c.is_ascii_digit())
    {
        CoarsePos::Other
    } else if VERBS.contains(&token)
        || (token.len() > 4 && (token.ends_with("ing") || token.ends_with("ed")))
    {
        CoarsePos::Verb
    } else {
        CoarsePos::Noun
    }
}

/// Surface-string counts over a training corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FreqTable(pub BTreeMap<String, u64>);

impl FreqTable {
    pub fn add(&mut self, surface: &[String]) {
        *self.0.entry(surface.join(" ")).or_default() += 1;
    }

    pub fn get(&self, surface: &[String]) -> u64 {
        self.0.get(&surface.join(" ")).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MentionFeatures {
    pub log_freq: f64,
    pub pos: CoarsePos,
    /// Indices of set context slots, sorted and unique.
    pub context: Vec<usize>,
    pub cosine: f64,
}

impl MentionFeatures {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; MENTION_FEATURES];
        x[0] = self.log_freq;
        x[1 + self.pos as usize] = 1.0;
        for &c in &self.context {
            x[4 + c] = 1.0;
        }
        x[MENTION_FEATURES - 1] = self.cosine;
        x
    }
}

fn context_slot(gram: &str) -> usize {
    (fnv1a64(gram.as_bytes()) % CONTEXT_SLOTS as u64) as usize
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Features for the mention at `span` (token range `[start, end)`). The
/// context is up to three tokens on each side; unigrams and bigrams within
/// each side are hashed into the indicator slots.
pub fn mention_features(
    tokens: &[String],
    span: (usize, usize),
    embeddings: &EmbeddingTable,
    freq: &FreqTable,
) -> Result<MentionFeatures> {
    let (start, end) = span;
    if start >= end || end > tokens.len() {
        return Err(Error::OutOfRange {
            index: end.max(start),
            len: tokens.len(),
        });
    }
    let mention = &tokens[start..end];
    let left = &tokens[start.saturating_sub(CONTEXT_WINDOW)..start];
    let right = &tokens[end..(end + CONTEXT_WINDOW).min(tokens.len())];

    let mut context = Vec::new();
    for side in [left, right] {
        for (i, t) in side.iter().enumerate() {
            context.push(context_slot(t));
            if let Some(next) = side.get(i + 1) {
                context.push(context_slot(&format!("{t} {next}")));
            }
        }
    }
    context.sort_unstable();
    context.dedup();

    let ctx_tokens: Vec<&String> = left.iter().chain(right).collect();
    let m = embeddings.mean(mention).expect("mention is non-empty");
    let cos = match embeddings.mean(&ctx_tokens) {
        Some(c) => cosine(&m, &c),
        None => 0.0,
    };
    Ok(MentionFeatures {
        log_freq: (1.0 + freq.get(mention) as f64).ln(),
        pos: coarse_pos(&mention[mention.len() - 1]),
        context,
        cosine: cos,
    })
}

/// Logistic mention scorer over [`MentionFeatures`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentionScorer {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
    pub freq: FreqTable,
}

impl MentionScorer {
    pub fn zeros() -> Self {
        Self {
            weights: vec![0.0; MENTION_FEATURES],
            bias: 0.0,
            threshold: DEFAULT_THRESHOLD,
            freq: FreqTable::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != MENTION_FEATURES {
            return Err(Error::Shape {
                expected: MENTION_FEATURES,
                actual: self.weights.len(),
            });
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        Ok(())
    }

    pub fn score_dense(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::Shape {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        Ok(sigmoid(
            self.bias + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>(),
        ))
    }

    pub fn score(&self, f: &MentionFeatures) -> Result<f64> {
        self.score_dense(&f.to_dense())
    }
}

/// A linked parameter with the scorer's confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedParameter {
    pub entity_id: String,
    pub score: f64,
}

/// Taxonomy, matcher and scorer, bundled for extraction.
#[derive(Debug, Clone)]
pub struct ParamExtractor {
    pub taxonomy: Taxonomy,
    pub matcher: SurfaceMatcher,
    pub scorer: MentionScorer,
    pub compat: CompatibilityMatrix,
}

impl ParamExtractor {
    pub fn new(taxonomy: Taxonomy, scorer: MentionScorer) -> Result<Self> {
        scorer.validate()?;
        Ok(Self {
            matcher: SurfaceMatcher::new(&taxonomy),
            taxonomy,
            scorer,
            compat: CompatibilityMatrix::default(),
        })
    }

    /// Mentions of the template's entity type scoring at least the
    /// threshold, first occurrence per entity, in text order.
    pub fn extract(
        &self,
        tokens: &[String],
        template: TemplateId,
        embeddings: &EmbeddingTable,
    ) -> Result<Vec<ExtractedParameter>> {
        let Some(Some(ty)) = self.compat.get(template) else {
            return Ok(Vec::new());
        };
        let mut out: Vec<ExtractedParameter> = Vec::new();
        for MentionSpan {
            entity_id,
            start,
            end,
        } in self.matcher.match_mentions(tokens)
        {
            let Some(entity) = self.taxonomy.get(&entity_id) else {
                continue;
            };
            if entity.entity_type != ty || out.iter().any(|p| p.entity_id == entity_id) {
                continue;
            }
            let f = mention_features(tokens, (start, end), embeddings, &self.scorer.freq)?;
            let score = self.scorer.score(&f)?;
            if score >= self.scorer.threshold {
                out.push(ExtractedParameter { entity_id, score });
            }
        }
        Ok(out)
    }
}

/// Parameter ids for `template` in `sentence`.
pub fn extract_parameters(
    sentence: &str,
    template: TemplateId,
    extractor: &ParamExtractor,
    embeddings: &EmbeddingTable,
) -> Result<Vec<String>> {
    Ok(extractor
        .extract(&tokenize(sentence), template, embeddings)?
        .into_iter()
        .map(|p| p.entity_id)
        .collect())
}

/// Locates each example's mention (the first span matching its entity id)
/// and returns `(tokens, span, label)`. Examples whose mention the matcher
/// cannot find are dropped.
fn locate(
    examples: &[MentionExample],
    matcher: &SurfaceMatcher,
) -> Vec<(Vec<String>, (usize, usize), bool)> {
    examples
        .iter()
        .filter_map(|ex| {
            let tokens = tokenize(&ex.text);
            let span = matcher
                .match_mentions(&tokens)
                .into_iter()
                .find(|m| m.entity_id == ex.entity_id)?;
            Some((tokens, (span.start, span.end), ex.label))
        })
        .collect()
}

/// Fits the scorer on labelled mention contexts. Mention frequencies are
/// counted over the same examples.
pub fn train_mention_scorer(
    examples: &[MentionExample],
    taxonomy: &Taxonomy,
    embeddings: &EmbeddingTable,
    hyper: &LinearHyper,
) -> Result<MentionScorer> {
    let matcher = SurfaceMatcher::new(taxonomy);
    let located = locate(examples, &matcher);
    if located.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut freq = FreqTable::default();
    for (tokens, (s, e), _) in &located {
        freq.add(&tokens[*s..*e]);
    }
    let mut xs = Vec::with_capacity(located.len());
    let mut ys = Vec::with_capacity(located.len());
    for (tokens, span, label) in &located {
        xs.push(dense_to_sparse(
            &mention_features(tokens, *span, embeddings, &freq)?.to_dense(),
        ));
        ys.push(*label);
    }
    let mut lr = LogisticRegression::zeros(MENTION_FEATURES);
    lr.fit(&xs, &ys, hyper)?;
    Ok(MentionScorer {
        weights: lr.weights,
        bias: lr.bias,
        threshold: DEFAULT_THRESHOLD,
        freq,
    })
}

/// Accuracy of the scorer's thresholded decision on labelled examples.
pub fn scorer_accuracy(
    scorer: &MentionScorer,
    examples: &[MentionExample],
    taxonomy: &Taxonomy,
    embeddings: &EmbeddingTable,
) -> Result<f64> {
    let located = locate(examples, &SurfaceMatcher::new(taxonomy));
    if located.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0;
    for (tokens, span, label) in &located {
        let p = scorer.score(&mention_features(tokens, *span, embeddings, &scorer.freq)?)?;
        if (p >= scorer.threshold) == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / located.len() as f64)
}
