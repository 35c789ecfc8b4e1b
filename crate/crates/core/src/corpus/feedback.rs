//! Append-only feedback file.
//!
//! Every accepted or rejected suggestion becomes one line. The file is never
//! rewritten; readers apply last-write-wins per `(job, template, parameter)`.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{dedup_feedback, load_dataset, FeedbackTriple};
use crate::error::{Error, Result};

#[derive(Debug)]
pub struct FeedbackLog {
    path: PathBuf,
    known_jobs: Option<HashSet<String>>,
    writer: Mutex<Writer>,
}

#[derive(Debug)]
struct Writer {
    file: File,
    next_offset: u64,
}

impl FeedbackLog {
    /// Opens (or creates) the log. When `known_jobs` is given, triples for
    /// any other job id are refused.
    pub fn open(path: impl AsRef<Path>, known_jobs: Option<HashSet<String>>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let existing: Vec<FeedbackTriple> = if path.exists() {
            load_dataset(&path)?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            path,
            known_jobs,
            writer: Mutex::new(Writer {
                file,
                next_offset: existing.len() as u64,
            }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Validates and durably appends one triple, returning its record offset.
    /// The line is synced to disk before this returns.
    pub fn record(&self, triple: &FeedbackTriple) -> Result<u64> {
        triple.validate()?;
        if let Some(known) = &self.known_jobs {
            if !known.contains(&triple.job_id) {
                return Err(Error::UnknownJob(triple.job_id.clone()));
            }
        }
        let mut line = serde_json::to_vec(triple)?;
        line.push(b'\n');
        let mut w = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        w.file
            .write_all(&line)
            .map_err(|e| Error::io(&self.path, e))?;
        w.file.sync_data().map_err(|e| Error::io(&self.path, e))?;
        let offset = w.next_offset;
        w.next_offset += 1;
        Ok(offset)
    }

    /// All triples after last-write-wins deduplication.
    pub fn read_deduped(&self) -> Result<Vec<FeedbackTriple>> {
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        read_feedback(&self.path)
    }
}

/// Loads a feedback file and deduplicates it. A missing file is empty.
pub fn read_feedback(path: impl AsRef<Path>) -> Result<Vec<FeedbackTriple>> {
    let path = path.as_ref();
    if !path.exists() {
        return Ok(Vec::new());
    }
    let raw: Vec<FeedbackTriple> = load_dataset(path)?;
    Ok(dedup_feedback(&raw))
}
