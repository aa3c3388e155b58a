#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use schemamatch::embedding::{EmbeddingProvider, EmbeddingVector, FixtureProvider, Vocabulary};
use schemamatch::schema::{load_alignment, load_instances, load_schema, GoldAlignment, Schema};
use schemamatch::Result;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn read_json(rel: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(rel)).unwrap()).unwrap()
}

/// Loads `<dir>/<name>.schema.json` with every table's instance file.
pub fn load_fixture_schema(dir: &str, name: &str) -> Schema {
    let schema = load_schema(fixture(&format!("{dir}/{name}.schema.json"))).unwrap();
    let files: BTreeMap<String, PathBuf> = schema
        .tables
        .iter()
        .map(|t| {
            let p = fixture(&format!("{dir}/instances/{name}.{}.csv", t.name));
            (t.name.clone(), p)
        })
        .collect();
    load_instances(schema, &files).unwrap()
}

pub struct Geo {
    pub source: Schema,
    pub target: Schema,
    pub gold: GoldAlignment,
    pub provider: FixtureProvider,
}

pub fn geo() -> Geo {
    Geo {
        source: load_fixture_schema("geo", "geo_en"),
        target: load_fixture_schema("geo", "geo_de"),
        gold: load_alignment(fixture("geo/gold.json")).unwrap(),
        provider: FixtureProvider::load(fixture("geo/embeddings.json")).unwrap(),
    }
}

pub fn movies() -> (Schema, FixtureProvider) {
    (
        load_fixture_schema("movies", "movies"),
        FixtureProvider::load(fixture("movies/embeddings.json")).unwrap(),
    )
}

/// Wraps a provider and records every text it is asked to embed.
pub struct Recording<P> {
    pub inner: P,
    pub seen: Mutex<Vec<String>>,
}

impl<P> Recording<P> {
    pub fn new(inner: P) -> Self {
        Recording {
            inner,
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn saw(&self, text: &str) -> bool {
        self.seen.lock().unwrap().iter().any(|t| t == text)
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for Recording<P> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn vocabulary(&self) -> Vocabulary {
        self.inner.vocabulary()
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        self.seen.lock().unwrap().extend(texts.iter().map(|t| t.to_string()));
        self.inner.embed_batch(texts)
    }
}
