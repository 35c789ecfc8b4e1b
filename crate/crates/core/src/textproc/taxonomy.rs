use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::error::{Error, Result};

/// The desk taxonomy shipped with the crate.
pub const BUNDLED_TAXONOMY: &str = include_str!("../../data/taxonomy.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityType {
    Degree,
    ToolSkill,
    SpokenLanguage,
    Credential,
}

impl EntityType {
    pub const ALL: [EntityType; 4] = [
        EntityType::Degree,
        EntityType::ToolSkill,
        EntityType::SpokenLanguage,
        EntityType::Credential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityType::Degree => "Degree",
            EntityType::ToolSkill => "ToolSkill",
            EntityType::SpokenLanguage => "SpokenLanguage",
            EntityType::Credential => "Credential",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown entity type {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub entity_type: EntityType,
    pub canonical: String,
    /// Tokenized surface forms, each non-empty.
    pub surfaces: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    entities: Vec<Entity>,
}

impl Taxonomy {
    pub fn new(entities: Vec<Entity>) -> Result<Self> {
        let mut ids = HashSet::new();
        for e in &entities {
            if e.id.is_empty() || !ids.insert(e.id.as_str()) {
                return Err(Error::Invalid(format!(
                    "duplicate or empty entity id {:?}",
                    e.id
                )));
            }
            if e.surfaces.is_empty() || e.surfaces.iter().any(Vec::is_empty) {
                return Err(Error::Invalid(format!(
                    "entity {:?} has an empty surface form",
                    e.id
                )));
            }
        }
        Ok(Self { entities })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TAXONOMY, "<bundled taxonomy>").expect("bundled taxonomy is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses the tab-separated format:
    /// `id <TAB> type <TAB> canonical name <TAB> surface|surface|...`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let mut entities = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.as_ref().to_path_buf(),
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err(format!(
                    "expected 4 tab-separated columns, got {}",
                    cols.len()
                )));
            }
            let entity_type = cols[1]
                .parse::<EntityType>()
                .map_err(|e| err(e.to_string()))?;
            let surfaces: Vec<Vec<String>> = cols[3].split('|').map(tokenize).collect();
            if surfaces.iter().any(Vec::is_empty) {
                return Err(err("empty surface form".into()));
            }
            entities.push(Entity {
                id: cols[0].trim().to_string(),
                entity_type,
                canonical: cols[2].trim().to_string(),
                surfaces,
            });
        }
        Self::new(entities)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# id\ttype\tcanonical name\tsurface forms (pipe separated)\n");
        for e in &self.entities {
            let surfaces: Vec<String> = e.surfaces.iter().map(|s| s.join(" ")).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.id,
                e.entity_type,
                e.canonical,
                surfaces.join("|")
            ));
        }
        out
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn of_type(&self, t: EntityType) -> impl Iterator<Item = &Entity> {
        self.entities.iter().filter(move |e| e.entity_type == t)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_taxonomy_covers_all_types() {
        let t = Taxonomy::bundled();
        assert!(t.len() >= 200, "{}", t.len());
        for ty in EntityType::ALL {
            assert!(t.of_type(ty).count() > 5, "{ty}");
        }
        assert_eq!(t.get("tool:c_cpp").unwrap().surfaces[0], vec!["c", "c++"]);
    }

    #[test]
    fn tsv_round_trip() {
        let t = Taxonomy::bundled();
        let back = Taxonomy::parse(&t.to_tsv(), "x").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Taxonomy::parse("a\tToolSkill\tA\ta\nb\tGadget\tB\tb\n", "tax").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(Taxonomy::parse("a\tToolSkill\tA\ta\na\tToolSkill\tA\tb\n", "tax").is_err());
        assert!(Taxonomy::parse("a\tToolSkill\tA\t ; \n", "tax").is_err());
    }
}
