use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_BUCKETS: usize = 4096;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over raw bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// Token embeddings: one row per in-vocabulary token followed by `buckets`
/// shared rows for everything else. Out-of-vocabulary tokens land in
/// bucket `fnv1a64(token) % buckets`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct EmbeddingTable {
    dim: usize,
    buckets: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major, `(tokens.len() + buckets) * dim`.
    pub(crate) weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    dim: usize,
    buckets: usize,
    hash: String,
    tokens: Vec<String>,
    weights: Vec<f64>,
}

impl From<EmbeddingTable> for TableRepr {
    fn from(t: EmbeddingTable) -> Self {
        TableRepr {
            dim: t.dim,
            buckets: t.buckets,
            hash: "fnv1a64".into(),
            tokens: t.tokens,
            weights: t.weights,
        }
    }
}

impl TryFrom<TableRepr> for EmbeddingTable {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        if r.hash != "fnv1a64" {
            return Err(Error::Format(format!("unsupported OOV hash {:?}", r.hash)));
        }
        EmbeddingTable::from_parts(r.dim, r.buckets, r.tokens, r.weights)
    }
}

impl EmbeddingTable {
    pub fn from_parts(
        dim: usize,
        buckets: usize,
        tokens: Vec<String>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 || buckets == 0 {
            return Err(Error::Config(
                "embedding dim and bucket count must be positive".into(),
            ));
        }
        let expected = (tokens.len() + buckets) * dim;
        if weights.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: weights.len(),
            });
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vocabulary token {t:?}")));
            }
        }
        Ok(Self {
            dim,
            buckets,
            tokens,
            index,
            weights,
        })
    }

    /// Uniform random rows in `[-scale, scale]`.
    pub fn random<R: Rng>(
        vocab: Vec<String>,
        dim: usize,
        buckets: usize,
        scale: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let n = (vocab.len() + buckets) * dim;
        let weights = (0..n).map(|_| rng.gen_range(-scale..=scale)).collect();
        Self::from_parts(dim, buckets, vocab, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn vocab_len(&self) -> usize {
        self.tokens.len()
    }

    pub fn rows(&self) -> usize {
        self.tokens.len() + self.buckets
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn bucket_of(&self, token: &str) -> usize {
        (fnv1a64(token.as_bytes()) % self.buckets as u64) as usize
    }

    /// Row index backing `token`.
    pub fn row_of(&self, token: &str) -> usize {
        match self.index.get(token) {
            Some(&i) => i,
            None => self.tokens.len() + self.bucket_of(token),
        }
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.weights[row * self.dim..(row + 1) * self.dim]
    }

    pub fn lookup(&self, token: &str) -> &[f64] {
        self.row(self.row_of(token))
    }

    /// Mean of the token vectors; `None` for an empty slice.
    pub fn mean<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Vec<f64>> {
        if tokens.is_empty() {
            return None;
        }
        let mut acc = vec![0.0; self.dim];
        for t in tokens {
            for (a, v) in acc.iter_mut().zip(self.lookup(t.as_ref())) {
                *a += v;
            }
        }
        let n = tokens.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Some(acc)
    }

    /// Overwrites in-vocabulary rows from a text file of `token v1 .. vd`
    /// lines. Unknown tokens are skipped. Returns how many rows were loaded.
    pub fn load_pretrained(&mut self, path: impl AsRef<Path>) -> Result<usize> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut loaded = 0;
        for (i, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(token) = parts.next() else { continue };
            let values: Vec<f64> = parts
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("{e}"),
                })?;
            if values.len() != self.dim {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected {} values, got {}", self.dim, values.len()),
                });
            }
            if let Some(&row) = self.index.get(token) {
                self.weights[row * self.dim..(row + 1) * self.dim].copy_from_slice(&values);
                loaded += 1;
            }
        }
        Ok(loaded)
    }
}
