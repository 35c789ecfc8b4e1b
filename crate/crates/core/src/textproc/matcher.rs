//! Token-level gazetteer matching with a trie over surface forms.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Taxonomy;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MentionSpan {
    pub entity_id: String,
    /// Token range `[start, end)`.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Default, Clone)]
struct Node {
    children: HashMap<String, usize>,
    /// Entity index whose surface form ends here.
    terminal: Option<usize>,
}

/// Leftmost-longest, non-overlapping matcher over tokenized surface forms.
///
/// When two entities share a surface form, the one listed first in the
/// taxonomy owns it.
#[derive(Debug, Clone)]
pub struct SurfaceMatcher {
    nodes: Vec<Node>,
    entity_ids: Vec<String>,
}

impl SurfaceMatcher {
    pub fn new(taxonomy: &Taxonomy) -> Self {
        let mut nodes = vec![Node::default()];
        let mut entity_ids = Vec::with_capacity(taxonomy.len());
        for (ei, entity) in taxonomy.entities().iter().enumerate() {
            entity_ids.push(entity.id.clone());
            for surface in &entity.surfaces {
                let mut cur = 0;
                for tok in surface {
                    cur = match nodes[cur].children.get(tok) {
                        Some(&n) => n,
                        None => {
                            nodes.push(Node::default());
                            let n = nodes.len() - 1;
                            nodes[cur].children.insert(tok.clone(), n);
                            n
                        }
                    };
                }
                nodes[cur].terminal.get_or_insert(ei);
            }
        }
        Self { nodes, entity_ids }
    }

    /// Longest surface form starting at `pos`: `(entity index, length)`.
    fn longest_at<S: AsRef<str>>(&self, tokens: &[S], pos: usize) -> Option<(usize, usize)> {
        let mut cur = 0;
        let mut best = None;
        for (k, tok) in tokens[pos..].iter().enumerate() {
            match self.nodes[cur].children.get(tok.as_ref()) {
                Some(&n) => cur = n,
                None => break,
            }
            if let Some(e) = self.nodes[cur].terminal {
                best = Some((e, k + 1));
            }
        }
        best
    }

    pub fn match_mentions<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<MentionSpan> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < tokens.len() {
            match self.longest_at(tokens, pos) {
                Some((e, len)) => {
                    out.push(MentionSpan {
                        entity_id: self.entity_ids[e].clone(),
                        start: pos,
                        end: pos + len,
                    });
                    pos += len;
                }
                None => pos += 1,
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::{tokenize, Entity, EntityType};

    fn tax(entries: &[(&str, EntityType, &[&str])]) -> Taxonomy {
        Taxonomy::new(
            entries
                .iter()
                .map(|(id, t, surf)| Entity {
                    id: id.to_string(),
                    entity_type: *t,
                    canonical: id.to_string(),
                    surfaces: surf.iter().map(|s| tokenize(s)).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_token_match() {
        let m = SurfaceMatcher::new(&tax(&[("java", EntityType::ToolSkill, &["java"])]));
        let got = m.match_mentions(&tokenize("experience in java"));
        assert_eq!(
            got,
            vec![MentionSpan {
                entity_id: "java".into(),
                start: 2,
                end: 3
            }]
        );
    }

    #[test]
    fn longest_wins() {
        let m = SurfaceMatcher::new(&tax(&[
            ("degree", EntityType::Degree, &["degree"]),
            ("masters", EntityType::Degree, &["master's degree"]),
        ]));
        let got = m.match_mentions(&tokenize("master's degree required"));
        assert_eq!(got.len(), 1);
        assert_eq!(
            (got[0].entity_id.as_str(), got[0].start, got[0].end),
            ("masters", 0, 2)
        );
    }

    #[test]
    fn no_match_is_empty() {
        let m = SurfaceMatcher::new(&Taxonomy::bundled());
        assert!(m
            .match_mentions(&tokenize("great team and free snacks"))
            .is_empty());
        assert!(m.match_mentions::<String>(&[]).is_empty());
    }

    #[test]
    fn bundled_example_sentence() {
        let m = SurfaceMatcher::new(&Taxonomy::bundled());
        let ids: Vec<String> = m
            .match_mentions(&tokenize("4+ years experience in Java and C/C++"))
            .into_iter()
            .map(|s| s.entity_id)
            .collect();
        assert_eq!(ids, vec!["tool:java", "tool:c_cpp"]);
    }
}
