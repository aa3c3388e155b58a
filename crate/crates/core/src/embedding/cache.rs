use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use super::{EmbeddingProvider, EmbeddingVector, Vocabulary};
use crate::error::Result;

/// Memoizes a provider by exact text. Entries are written once; concurrent
/// first requests for the same text may both reach the inner provider, but
/// only the first result is kept, so every caller sees the same vector.
pub struct CachedProvider<P> {
    inner: P,
    entries: RwLock<HashMap<String, Option<EmbeddingVector>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<P: EmbeddingProvider> CachedProvider<P> {
    pub fn new(inner: P) -> Self {
        CachedProvider {
            inner,
            entries: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for CachedProvider<P> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn vocabulary(&self) -> Vocabulary {
        self.inner.vocabulary()
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        let mut out: Vec<Option<Option<EmbeddingVector>>> = Vec::with_capacity(texts.len());
        let mut missing: Vec<&str> = Vec::new();
        {
            let entries = self.entries.read().expect("cache lock");
            for t in texts {
                match entries.get(*t) {
                    Some(v) => out.push(Some(v.clone())),
                    None => {
                        out.push(None);
                        missing.push(t);
                    }
                }
            }
        }
        self.hits
            .fetch_add((texts.len() - missing.len()) as u64, Ordering::Relaxed);
        if missing.is_empty() {
            return Ok(out.into_iter().map(|v| v.expect("all hits")).collect());
        }
        missing.sort_unstable();
        missing.dedup();
        self.misses.fetch_add(missing.len() as u64, Ordering::Relaxed);
        let fresh = self.inner.embed_batch(&missing)?;
        let mut entries = self.entries.write().expect("cache lock");
        for (t, v) in missing.iter().zip(fresh) {
            entries.entry((*t).to_string()).or_insert(v);
        }
        Ok(texts
            .iter()
            .zip(out)
            .map(|(t, v)| v.unwrap_or_else(|| entries[*t].clone()))
            .collect())
    }
}
