//! Versioned, self-describing model files.
//!
//! Each file is a JSON object `{format, version, kind, payload}`. Loading
//! checks all three header fields before decoding the payload.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::param::{MentionScorer, ParamExtractor};
use crate::pipeline::SqgModels;
use crate::ranker::QuestionRanker;
use crate::tc::DanTcModel;
use crate::textproc::Taxonomy;

pub const FORMAT: &str = "sqgen-model";
pub const VERSION: u32 = 1;

pub trait ModelKind: Serialize + DeserializeOwned {
    const KIND: &'static str;

    fn check(&self) -> Result<()> {
        Ok(())
    }
}

impl ModelKind for DanTcModel {
    const KIND: &'static str = "tc-dan";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl ModelKind for MentionScorer {
    const KIND: &'static str = "mention-scorer";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl ModelKind for QuestionRanker {
    const KIND: &'static str = "question-ranker";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    format: &'a str,
    version: u32,
    kind: &'a str,
    payload: &'a T,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: String,
    payload: serde_json::Value,
}

pub fn to_string<T: ModelKind>(model: &T) -> Result<String> {
    Ok(serde_json::to_string(&Envelope {
        format: FORMAT,
        version: VERSION,
        kind: T::KIND,
        payload: model,
    })?)
}

pub fn from_str<T: ModelKind>(text: &str) -> Result<T> {
    let h: Header = serde_json::from_str(text)?;
    if h.format != FORMAT {
        return Err(Error::Format(format!(
            "not a model file (format {:?})",
            h.format
        )));
    }
    if h.version != VERSION {
        return Err(Error::Format(format!(
            "model file version {} is not supported (expected {VERSION})",
            h.version
        )));
    }
    if h.kind != T::KIND {
        return Err(Error::Format(format!(
            "expected a {} model, found {}",
            T::KIND,
            h.kind
        )));
    }
    let model: T = serde_json::from_value(h.payload)?;
    model.check()?;
    Ok(model)
}

pub fn save<T: ModelKind>(model: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, to_string(model)?).map_err(|e| Error::io(path, e))
}

pub fn load<T: ModelKind>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&text)
}

/// Settings stored beside the component files of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSettings {
    pub k: usize,
    pub null_margin: f64,
}

impl ModelKind for BundleSettings {
    const KIND: &'static str = "bundle-settings";
}

pub const TC_FILE: &str = "tc.json";
pub const SCORER_FILE: &str = "scorer.json";
pub const RANKER_FILE: &str = "ranker.json";
pub const SETTINGS_FILE: &str = "bundle.json";
pub const TAXONOMY_FILE: &str = "taxonomy.tsv";

/// Writes every component of `models` into `dir`.
pub fn save_bundle(models: &SqgModels, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    save(&models.tc, dir.join(TC_FILE))?;
    save(&models.extractor.scorer, dir.join(SCORER_FILE))?;
    save(&models.ranker, dir.join(RANKER_FILE))?;
    save(
        &BundleSettings {
            k: models.k,
            null_margin: models.null_margin,
        },
        dir.join(SETTINGS_FILE),
    )?;
    let tax = dir.join(TAXONOMY_FILE);
    std::fs::write(&tax, models.extractor.taxonomy.to_tsv()).map_err(|e| Error::io(&tax, e))
}

pub fn load_bundle(dir: impl AsRef<Path>) -> Result<SqgModels> {
    let dir = dir.as_ref();
    let taxonomy = Taxonomy::load(dir.join(TAXONOMY_FILE))?;
    let settings: BundleSettings = load(dir.join(SETTINGS_FILE))?;
    let mut models = SqgModels::new(
        load(dir.join(TC_FILE))?,
        ParamExtractor::new(taxonomy, load(dir.join(SCORER_FILE))?)?,
        load(dir.join(RANKER_FILE))?,
    )?;
    models.k = settings.k;
    models.null_margin = settings.null_margin;
    models.validate()?;
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::MentionScorer;

    #[test]
    fn round_trip_and_header_checks() {
        let mut s = MentionScorer::zeros();
        s.weights[3] = 0.1 + 0.2;
        s.bias = -1e-300;
        let text = to_string(&s).unwrap();
        let back: MentionScorer = from_str(&text).unwrap();
        assert_eq!(back, s);

        let bumped = text.replacen("\"version\":1", "\"version\":2", 1);
        assert!(
            matches!(from_str::<MentionScorer>(&bumped), Err(Error::Format(m)) if m.contains("version 2"))
        );
        let wrong_kind = text.replacen("mention-scorer", "tc-dan", 1);
        assert!(from_str::<MentionScorer>(&wrong_kind).is_err());
        assert!(from_str::<DanTcModel>(&text).is_err());
        assert!(from_str::<MentionScorer>("{}").is_err());
    }

    #[test]
    fn invalid_payload_is_rejected() {
        let mut s = MentionScorer::zeros();
        s.weights.pop();
        let text = to_string(&s).unwrap();
        assert!(from_str::<MentionScorer>(&text).is_err());
    }
}
