//! Line-delimited JSON dataset files.
//!
//! One record per line, UTF-8. Blank lines are ignored. Any malformed line
//! aborts the load and the error carries its 1-based line number.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{FeedbackTriple, JobPosting, LabeledSentence, MentionExample};
use crate::error::{Error, Result};

/// The file kinds a corpus directory holds. The taxonomy is a separate
/// tab-separated format, see [`crate::textproc::Taxonomy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Jobs,
    Sentences,
    Feedback,
    Mentions,
}

impl DatasetKind {
    pub fn default_file_name(self) -> &'static str {
        match self {
            DatasetKind::Jobs => "jobs.jsonl",
            DatasetKind::Sentences => "sentences.jsonl",
            DatasetKind::Feedback => "feedback.jsonl",
            DatasetKind::Mentions => "mentions.jsonl",
        }
    }
}

/// Per-record checks applied after a line parses.
pub trait Record: Serialize + DeserializeOwned {
    const KIND: DatasetKind;

    fn check(&self) -> Result<()> {
        Ok(())
    }
}

impl Record for JobPosting {
    const KIND: DatasetKind = DatasetKind::Jobs;

    fn check(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Invalid("empty job id".into()));
        }
        Ok(())
    }
}

impl Record for LabeledSentence {
    const KIND: DatasetKind = DatasetKind::Sentences;

    fn check(&self) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(Error::Invalid("empty sentence text".into()));
        }
        Ok(())
    }
}

impl Record for FeedbackTriple {
    const KIND: DatasetKind = DatasetKind::Feedback;

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl Record for MentionExample {
    const KIND: DatasetKind = DatasetKind::Mentions;

    fn check(&self) -> Result<()> {
        if self.text.trim().is_empty() || self.entity_id.is_empty() {
            return Err(Error::Invalid(
                "mention example needs text and entity id".into(),
            ));
        }
        Ok(())
    }
}

pub fn load_dataset<T: Record>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_dataset_str(&text, path)
}

/// Parses dataset text; `origin` is only used in error messages.
pub fn load_dataset_str<T: Record>(text: &str, origin: impl AsRef<Path>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.as_ref().to_path_buf(),
            line: i + 1,
            message,
        };
        let record: T = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        record.check().map_err(|e| parse_err(e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_dataset<T: Record>(records: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
