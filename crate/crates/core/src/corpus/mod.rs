//! Data model, dataset files and the synthetic corpus generator.

mod banks;
mod feedback;
mod io;
pub mod synth;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use banks::default_job_schema;
pub use feedback::{read_feedback, FeedbackLog};
pub use io::{load_dataset, load_dataset_str, write_dataset, DatasetKind};
pub use synth::{
    gen_synthetic_corpus, read_job_schema, CorpusBundle, InteractionPreference, MentionExample,
    PreferenceFn, SentenceSplits, SplitCounts, SynthConfig,
};

/// The eight categorical job-side features used by the default schema.
pub const DEFAULT_JOB_FEATURES: [&str; 8] = [
    "industry",
    "company_size",
    "seniority",
    "function",
    "region",
    "employment_status",
    "experience_level",
    "title_group",
];

/// Question template. The discriminant is the class index used by the
/// classifier, so the order here is part of every model file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemplateId {
    #[serde(rename = "NULL")]
    Null = 0,
    WorkAuth = 1,
    Sponsorship = 2,
    Education = 3,
    Language = 4,
    Credential = 5,
    Tools = 6,
}

impl TemplateId {
    pub const COUNT: usize = 7;

    pub const ALL: [TemplateId; 7] = [
        TemplateId::Null,
        TemplateId::WorkAuth,
        TemplateId::Sponsorship,
        TemplateId::Education,
        TemplateId::Language,
        TemplateId::Credential,
        TemplateId::Tools,
    ];

    /// Every template except `NULL`.
    pub const QUESTIONS: [TemplateId; 6] = [
        TemplateId::WorkAuth,
        TemplateId::Sponsorship,
        TemplateId::Education,
        TemplateId::Language,
        TemplateId::Credential,
        TemplateId::Tools,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TemplateId::Null => "NULL",
            TemplateId::WorkAuth => "WorkAuth",
            TemplateId::Sponsorship => "Sponsorship",
            TemplateId::Education => "Education",
            TemplateId::Language => "Language",
            TemplateId::Credential => "Credential",
            TemplateId::Tools => "Tools",
        }
    }

    /// Whether questions of this template carry a parameter.
    pub fn takes_parameter(self) -> bool {
        matches!(
            self,
            TemplateId::Education
                | TemplateId::Language
                | TemplateId::Credential
                | TemplateId::Tools
        )
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TemplateId::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown template {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobPosting {
    pub id: String,
    pub title: String,
    pub body: String,
    pub job_features: BTreeMap<String, String>,
}

/// A `(template, parameter)` pair. Construct through [`ScreeningQuestion::new`]
/// to get the invariants checked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScreeningQuestion {
    pub template: TemplateId,
    pub parameter: Option<String>,
}

impl ScreeningQuestion {
    pub fn new(template: TemplateId, parameter: Option<String>) -> Result<Self> {
        validate_question(template, parameter.as_deref())?;
        Ok(Self {
            template,
            parameter,
        })
    }

    /// Ordering used to break score ties: template index, then parameter id.
    pub fn tie_key(&self) -> (usize, Option<&str>) {
        (self.template.index(), self.parameter.as_deref())
    }
}

impl fmt::Display for ScreeningQuestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.parameter {
            Some(p) => write!(f, "{}({})", self.template, p),
            None => write!(f, "{}", self.template),
        }
    }
}

pub(crate) fn validate_question(template: TemplateId, parameter: Option<&str>) -> Result<()> {
    if template == TemplateId::Null {
        return Err(Error::Invalid("NULL is not a question template".into()));
    }
    match (template.takes_parameter(), parameter) {
        (true, None) => Err(Error::Invalid(format!(
            "template {template} requires a parameter"
        ))),
        (false, Some(p)) => Err(Error::Invalid(format!(
            "template {template} takes no parameter, got {p:?}"
        ))),
        (_, Some("")) => Err(Error::Invalid("empty parameter id".into())),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledSentence {
    pub text: String,
    pub template: TemplateId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackLabel {
    Accepted,
    Rejected,
}

impl FeedbackLabel {
    pub fn is_accepted(self) -> bool {
        self == FeedbackLabel::Accepted
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackTriple {
    pub job_id: String,
    pub template: TemplateId,
    #[serde(default)]
    pub parameter: Option<String>,
    pub label: FeedbackLabel,
    pub timestamp: u64,
}

impl FeedbackTriple {
    pub fn validate(&self) -> Result<()> {
        if self.job_id.is_empty() {
            return Err(Error::Invalid("empty job id".into()));
        }
        validate_question(self.template, self.parameter.as_deref())
    }

    pub fn key(&self) -> (&str, TemplateId, Option<&str>) {
        (&self.job_id, self.template, self.parameter.as_deref())
    }

    pub fn question(&self) -> ScreeningQuestion {
        ScreeningQuestion {
            template: self.template,
            parameter: self.parameter.clone(),
        }
    }
}

/// Collapses repeated `(job, template, parameter)` keys, keeping the last
/// occurrence. Output order is the position of each key's first occurrence.
pub fn dedup_feedback(triples: &[FeedbackTriple]) -> Vec<FeedbackTriple> {
    let mut slot: std::collections::HashMap<(String, TemplateId, Option<String>), usize> =
        std::collections::HashMap::new();
    let mut out: Vec<FeedbackTriple> = Vec::new();
    for t in triples {
        let key = (t.job_id.clone(), t.template, t.parameter.clone());
        match slot.get(&key) {
            Some(&i) => out[i] = t.clone(),
            None => {
                slot.insert(key, out.len());
                out.push(t.clone());
            }
        }
    }
    out
}

/// Checks job ids are non-empty and unique, and that every feature name is
/// declared in `schema`.
pub fn validate_jobs(jobs: &[JobPosting], schema: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for job in jobs {
        if job.id.is_empty() {
            return Err(Error::Invalid("empty job id".into()));
        }
        if !seen.insert(job.id.as_str()) {
            return Err(Error::Invalid(format!("duplicate job id {:?}", job.id)));
        }
        if let Some(name) = job.job_features.keys().find(|k| !schema.contains(k)) {
            return Err(Error::Invalid(format!(
                "job {:?} has undeclared feature {name:?}",
                job.id
            )));
        }
    }
    Ok(())
}
