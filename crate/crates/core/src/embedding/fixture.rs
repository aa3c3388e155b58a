use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::{normalize_lookup_key, EmbeddingProvider, EmbeddingVector, Vocabulary};
use crate::error::{Error, Result};

/// Closed-vocabulary provider backed by a fixed table of vectors.
///
/// File format: `{"dimension": D, "entries": {"<text>": [D floats], ...}}`.
/// Lookup is exact on the normalized text (see [`normalize_lookup_key`]).
#[derive(Debug, Clone)]
pub struct FixtureProvider {
    dimension: usize,
    entries: HashMap<String, EmbeddingVector>,
}

#[derive(Deserialize)]
struct FixtureFile {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
}

impl FixtureProvider {
    pub fn new(dimension: usize, entries: impl IntoIterator<Item = (String, Vec<f64>)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::validation("fixture dimension must be positive"));
        }
        let mut map = HashMap::new();
        for (text, components) in entries {
            if components.len() != dimension {
                return Err(Error::validation(format!(
                    "fixture entry `{text}` has {} components, expected {dimension}",
                    components.len()
                )));
            }
            let v = EmbeddingVector::new(components)
                .map_err(|e| Error::validation(format!("fixture entry `{text}`: {e}")))?;
            map.insert(normalize_lookup_key(&text), v);
        }
        Ok(FixtureProvider {
            dimension,
            entries: map,
        })
    }

    pub fn parse(content: &str, origin: &str) -> Result<Self> {
        let file: FixtureFile = serde_json::from_str(content).map_err(|e| Error::Parse {
            location: format!("{origin}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        FixtureProvider::new(file.dimension, file.entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FixtureProvider::parse(&content, &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, text: &str) -> Option<&EmbeddingVector> {
        self.entries.get(&normalize_lookup_key(text))
    }
}

impl EmbeddingProvider for FixtureProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn vocabulary(&self) -> Vocabulary {
        Vocabulary::Closed
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        Ok(texts.iter().map(|t| self.get(t).cloned()).collect())
    }
}
