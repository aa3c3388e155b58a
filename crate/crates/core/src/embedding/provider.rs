use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::EmbeddingVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vocabulary {
    /// May report texts as out of vocabulary.
    Closed,
    /// Produces a vector for any text.
    Open,
}

/// A source of embedding vectors.
///
/// Implementations must be deterministic (equal text, equal vector) and safe
/// to call from several threads at once. `None` marks an out-of-vocabulary
/// text; transport failures are errors, never `None`.
pub trait EmbeddingProvider: Send + Sync {
    fn dimension(&self) -> usize;

    fn vocabulary(&self) -> Vocabulary;

    /// Embeds every text; the output has one entry per input, in order.
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Arc<P> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn vocabulary(&self) -> Vocabulary {
        (**self).vocabulary()
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        (**self).embed_batch(texts)
    }
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for &P {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn vocabulary(&self) -> Vocabulary {
        (**self).vocabulary()
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        (**self).embed_batch(texts)
    }
}

/// Lookup key used by dictionary-style providers: NFC, lowercase, single
/// spaces, trimmed.
pub fn normalize_lookup_key(text: &str) -> String {
    let lowered = text.nfc().collect::<String>().to_lowercase();
    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Embeds one text. Blank text is out of vocabulary for every provider.
pub fn embed_text(provider: &dyn EmbeddingProvider, text: &str) -> Result<Option<EmbeddingVector>> {
    Ok(embed_texts(provider, &[text])?.pop().flatten())
}

/// Embeds many texts with a single provider call. Duplicates are sent once,
/// blank texts are not sent at all.
pub fn embed_texts(
    provider: &dyn EmbeddingProvider,
    texts: &[&str],
) -> Result<Vec<Option<EmbeddingVector>>> {
    let mut unique: Vec<&str> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let slots: Vec<Option<usize>> = texts
        .iter()
        .map(|t| {
            if t.trim().is_empty() {
                return None;
            }
            Some(*index.entry(t).or_insert_with(|| {
                unique.push(t);
                unique.len() - 1
            }))
        })
        .collect();
    if unique.is_empty() {
        return Ok(vec![None; texts.len()]);
    }
    let vectors = provider.embed_batch(&unique)?;
    if vectors.len() != unique.len() {
        return Err(Error::Transport(format!(
            "provider returned {} vectors for {} texts",
            vectors.len(),
            unique.len()
        )));
    }
    let dim = provider.dimension();
    if let Some(bad) = vectors.iter().flatten().find(|v| v.dimension() != dim) {
        return Err(Error::Transport(format!(
            "provider declared dimension {dim} but returned a {}-dimensional vector",
            bad.dimension()
        )));
    }
    Ok(slots
        .into_iter()
        .map(|slot| slot.and_then(|i| vectors[i].clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::HashProvider;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Counting {
        inner: HashProvider,
        calls: AtomicUsize,
        texts: AtomicUsize,
    }

    impl EmbeddingProvider for Counting {
        fn dimension(&self) -> usize {
            self.inner.dimension()
        }
        fn vocabulary(&self) -> Vocabulary {
            Vocabulary::Open
        }
        fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.texts.fetch_add(texts.len(), Ordering::SeqCst);
            self.inner.embed_batch(texts)
        }
    }

    #[test]
    fn batch_dedups_and_skips_blank() {
        let p = Counting {
            inner: HashProvider::new(16),
            calls: AtomicUsize::new(0),
            texts: AtomicUsize::new(0),
        };
        let out = embed_texts(&p, &["a", "", "b", "a", "  "]).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out[1].is_none() && out[4].is_none());
        assert_eq!(out[0], out[3]);
        assert_eq!(p.calls.load(Ordering::SeqCst), 1);
        assert_eq!(p.texts.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn blank_text_is_oov() {
        assert!(embed_text(&HashProvider::new(8), "   ").unwrap().is_none());
    }

    #[test]
    fn lookup_key() {
        assert_eq!(normalize_lookup_key("  Capital   City "), "capital city");
    }
}
