//! Screening question generation.
//!
//! Turns the free text of a job posting into a short ranked list of
//! structured screening questions. Each question is a `(template, parameter)`
//! pair such as `(Education, deg:bachelors)` or `(WorkAuth, -)`.
//!
//! The pipeline has three learned stages:
//!
//! 1. [`tc`]: a deep averaging network classifies every sentence into one of
//!    seven question templates (or `NULL`).
//! 2. [`param`]: gazetteer matches from the [`textproc`] matcher are filtered
//!    by a contextual logistic scorer to find the template parameters.
//! 3. [`ranker`]: a gradient boosted tree ensemble ([`gbdt`]) scores every
//!    candidate question using job, question and PMI interaction features.
//!
//! [`pipeline`] wires them together, [`corpus`] owns the data model and the
//! synthetic training corpus, and [`eval`] holds the offline metrics.

// `!(a > b)` is deliberate wherever NaN must take the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod corpus;
pub mod error;
pub mod eval;
pub mod gbdt;
pub mod linear;
pub mod modelio;
pub mod optim;
pub mod param;
pub mod pipeline;
pub mod ranker;
pub mod tc;
pub mod textproc;

pub use corpus::{
    FeedbackLabel, FeedbackTriple, JobPosting, LabeledSentence, ScreeningQuestion, TemplateId,
};
pub use error::{Error, Result};
pub use pipeline::{generate_questions, RankedQuestion, SqgModels};
