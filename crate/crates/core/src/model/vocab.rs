use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

const DEFAULT_RELATIONS: &str = include_str!("../../config/relations.json");
const DEFAULT_CATEGORIES: &str = include_str!("../../config/categories.json");

/// Structural label for diagrams combining several structural categories.
pub const MIXED: &str = "mixed";

/// Ordered set of relation names accepted on parse-graph edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationVocabulary {
    names: Vec<String>,
}

#[derive(Deserialize)]
struct RelationsFile {
    relations: Vec<String>,
}

#[derive(Deserialize)]
struct CategoriesFile {
    semantic: Vec<String>,
    structural: Vec<String>,
}

impl RelationVocabulary {
    pub fn new(names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.into();
            if !out.contains(&n) {
                out.push(n);
            }
        }
        Self { names: out }
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        let file: RelationsFile = serde_json::from_str(raw)
            .map_err(|e| Error::usage(format!("relation vocabulary: {e}")))?;
        Ok(Self::new(file.relations))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl Default for RelationVocabulary {
    fn default() -> Self {
        Self::from_json(DEFAULT_RELATIONS).expect("bundled relation vocabulary is valid")
    }
}

/// The semantic (subject matter) and structural (diagram type) schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySchemes {
    pub semantic: Vec<String>,
    /// Includes the `mixed` sentinel.
    pub structural: Vec<String>,
}

impl CategorySchemes {
    pub fn from_json(raw: &str) -> Result<Self> {
        let file: CategoriesFile = serde_json::from_str(raw)
            .map_err(|e| Error::usage(format!("category schemes: {e}")))?;
        let mut structural = file.structural;
        if !structural.iter().any(|s| s == MIXED) {
            structural.push(MIXED.to_string());
        }
        Ok(Self {
            semantic: file.semantic,
            structural,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw)
    }

    pub fn is_semantic(&self, name: &str) -> bool {
        self.semantic.iter().any(|s| s == name)
    }

    pub fn is_structural(&self, name: &str) -> bool {
        self.structural.iter().any(|s| s == name)
    }
}

impl Default for CategorySchemes {
    fn default() -> Self {
        Self::from_json(DEFAULT_CATEGORIES).expect("bundled category schemes are valid")
    }
}
