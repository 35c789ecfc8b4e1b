//! TOML configuration. Every field has a default, so an empty file (or no
//! file at all) is a valid configuration.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sqgen_core::gbdt::{GbdtParams, Objective};
use sqgen_core::linear::LinearHyper;
use sqgen_core::tc::TcHyper;

/// Environment variable naming the configuration file.
pub const CONFIG_ENV: &str = "SQGEN_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Corpus directory as written by `gen-corpus`.
    pub data_dir: PathBuf,
    /// Where trained models and the serving bundle live.
    pub model_dir: PathBuf,
    /// Feedback log shared by the service and `train-ranker`. Defaults to
    /// `<data_dir>/feedback.jsonl`.
    pub feedback: Option<PathBuf>,
    pub corpus: CorpusConfig,
    pub tc: TcHyper,
    pub scorer: LinearHyper,
    pub ranker: RankerConfig,
    pub serve: ServeConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            data_dir: "data".into(),
            model_dir: "models".into(),
            feedback: None,
            corpus: CorpusConfig::default(),
            tc: TcHyper::default(),
            scorer: LinearHyper {
                lr: 1e-2,
                epochs: 50,
                batch_size: 32,
                l2: 0.0,
                seed: 0,
            },
            ranker: RankerConfig::default(),
            serve: ServeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Sentences per template in the training split; test and valid get
    /// half and a quarter of it.
    pub sentences_per_template: usize,
    /// Jobs in total, split 70/20/10.
    pub jobs: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            sentences_per_template: 1000,
            jobs: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankerConfig {
    pub gbdt: GbdtConfig,
    /// PMI smoothing.
    pub alpha: f64,
    /// Questions returned per job.
    pub k: usize,
    /// Minimum lead of the best template over NULL.
    pub null_margin: f64,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self {
            gbdt: GbdtConfig::default(),
            alpha: 0.5,
            k: sqgen_core::pipeline::DEFAULT_K,
            null_margin: 0.0,
        }
    }
}

/// Boosting parameters. Same fields as [`GbdtParams`], but missing fields
/// fall back to the pairwise defaults used for serving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtConfig {
    pub trees: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub min_leaf: usize,
    pub base_margin: f64,
    pub objective: Objective,
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        let p = GbdtParams::default();
        Self {
            trees: p.trees,
            max_depth: p.max_depth,
            eta: p.eta,
            gamma: p.gamma,
            lambda: p.lambda,
            min_leaf: p.min_leaf,
            base_margin: p.base_margin,
            objective: Objective::Pairwise,
            seed: p.seed,
        }
    }
}

impl GbdtConfig {
    pub fn params(&self) -> GbdtParams {
        GbdtParams {
            trees: self.trees,
            max_depth: self.max_depth,
            eta: self.eta,
            gamma: self.gamma,
            lambda: self.lambda,
            min_leaf: self.min_leaf,
            base_margin: self.base_margin,
            objective: self.objective,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub addr: String,
    /// Postings offered for review. Defaults to `<data_dir>/jobs_valid.jsonl`.
    pub jobs: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            addr: "127.0.0.1:8080".into(),
            jobs: None,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `path` when given, otherwise returns the defaults.
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Self::from_toml(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    /// Applies one seed to every stochastic stage.
    pub fn set_seed(&mut self, seed: u64) {
        self.corpus.seed = seed;
        self.tc.seed = seed;
        self.scorer.seed = seed;
        self.ranker.gbdt.seed = seed;
    }

    pub fn feedback_path(&self) -> PathBuf {
        self.feedback
            .clone()
            .unwrap_or_else(|| self.data_dir.join("feedback.jsonl"))
    }

    pub fn serve_jobs_path(&self) -> PathBuf {
        self.serve
            .jobs
            .clone()
            .unwrap_or_else(|| self.data_dir.join("jobs_valid.jsonl"))
    }

    pub fn tc_path(&self) -> PathBuf {
        self.model_dir.join("tc.json")
    }

    pub fn scorer_path(&self) -> PathBuf {
        self.model_dir.join("scorer.json")
    }
}
