//! Sentence splitting, tokenization, embeddings and gazetteer matching.

mod embedding;
mod matcher;
mod taxonomy;

use serde::{Deserialize, Serialize};

pub use embedding::{fnv1a64, EmbeddingTable, DEFAULT_BUCKETS, DEFAULT_DIM};
pub use matcher::{MentionSpan, SurfaceMatcher};
pub use taxonomy::{Entity, EntityType, Taxonomy, BUNDLED_TAXONOMY};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub job_id: String,
    pub index: usize,
    pub text: String,
    pub tokens: Vec<String>,
}

/// Splits a posting body into sentences.
///
/// Boundaries are newlines, a `.`, `!`, `?` or `;` followed by whitespace,
/// and a `•` bullet preceded by whitespace. Sentence text is trimmed; empty
/// pieces are dropped.
pub fn split_sentences(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in body.split(['\n', '\r']) {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut start = 0;
        for (k, &(pos, c)) in chars.iter().enumerate() {
            let next_ws = chars.get(k + 1).is_some_and(|&(_, n)| n.is_whitespace());
            if matches!(c, '.' | '!' | '?' | ';') && next_ws {
                push_trimmed(&mut out, &line[start..pos + c.len_utf8()]);
                start = pos + c.len_utf8();
            } else if c == '•' && k > 0 && chars[k - 1].1.is_whitespace() {
                push_trimmed(&mut out, &line[start..pos]);
                start = pos;
            }
        }
        push_trimmed(&mut out, &line[start..]);
    }
    out
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

/// Splits and tokenizes a posting into positioned [`Sentence`]s.
pub fn sentences_of(job_id: &str, body: &str) -> Vec<Sentence> {
    split_sentences(body)
        .into_iter()
        .enumerate()
        .map(|(index, text)| Sentence {
            job_id: job_id.to_string(),
            index,
            tokens: tokenize(&text),
            text,
        })
        .collect()
}

/// Lower-cased word tokens.
///
/// A token is a run of alphanumerics. `+` and `#` stay attached when they
/// trail a token (`c++`, `c#`, `4+`); `.` and `'` stay only between two
/// alphanumerics (`node.js`, `bachelor's`). Everything else separates.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for (i, &c) in chars.iter().enumerate() {
        let keep = if c.is_alphanumeric() {
            true
        } else if cur.is_empty() {
            false
        } else {
            match c {
                '+' | '#' => prev.is_some_and(|p| p.is_alphanumeric() || p == '+' || p == '#'),
                '.' | '\'' => {
                    prev.is_some_and(char::is_alphanumeric)
                        && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
                }
                _ => false,
            }
        };
        if keep {
            cur.extend(c.to_lowercase());
            prev = Some(c);
        } else {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            prev = None;
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// Drops HTML tags, turning block-level closers into line breaks.
pub fn strip_tags(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(open) = rest.find('<') {
        out.push_str(&rest[..open]);
        match rest[open..].find('>') {
            Some(close) => {
                let tag = rest[open + 1..open + close].trim().to_ascii_lowercase();
                let name = tag
                    .trim_start_matches('/')
                    .split_whitespace()
                    .next()
                    .unwrap_or("");
                if matches!(
                    name,
                    "br" | "br/" | "p" | "li" | "div" | "ul" | "ol" | "h1" | "h2" | "h3" | "tr"
                ) {
                    out.push('\n');
                }
                rest = &rest[open + close + 1..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}
