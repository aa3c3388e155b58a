//! Deterministic character-trigram hashing embedder.
//!
//! Procedure, fixed bit for bit: NFC-normalize and lowercase the text, split
//! it into maximal alphanumeric runs, wrap each token as `#token#` and walk
//! its character trigrams. Each trigram's UTF-8 bytes are hashed with 64-bit
//! FNV-1a; the hash adds -1 (top bit set) or +1 (top bit clear) at index
//! `hash % D`. Token vectors are L2-normalized, the text vector is the mean of
//! token vectors, L2-normalized again. Text without tokens, or whose token
//! vectors cancel exactly, maps to zero.

use unicode_normalization::UnicodeNormalization;

use super::{EmbeddingProvider, EmbeddingVector, Vocabulary};
use crate::error::Result;

pub const DEFAULT_HASH_DIMENSION: usize = 256;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn token_vector(token: &str, dimension: usize) -> Vec<f64> {
    let padded: Vec<char> = std::iter::once('#')
        .chain(token.chars())
        .chain(std::iter::once('#'))
        .collect();
    let mut v = vec![0.0f64; dimension];
    let mut buf = String::with_capacity(12);
    for window in padded.windows(3) {
        buf.clear();
        buf.extend(window);
        let h = fnv1a64(buf.as_bytes());
        let idx = (h % dimension as u64) as usize;
        v[idx] += if h >> 63 == 1 { -1.0 } else { 1.0 };
    }
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in &mut v {
            *c /= norm;
        }
    }
    v
}

pub fn hash_embed(text: &str, dimension: usize) -> EmbeddingVector {
    assert!(dimension > 0, "hash embedding dimension must be positive");
    let normalized: String = text.nfc().collect::<String>().to_lowercase();
    let mut acc = vec![0.0f64; dimension];
    let mut count = 0usize;
    for token in normalized
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
    {
        let tv = token_vector(token, dimension);
        if tv.iter().all(|&c| c == 0.0) {
            continue;
        }
        for (a, c) in acc.iter_mut().zip(&tv) {
            *a += c;
        }
        count += 1;
    }
    if count == 0 {
        return EmbeddingVector::zeros(dimension);
    }
    let n = count as f64;
    for a in &mut acc {
        *a /= n;
    }
    let norm = acc.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        // token vectors cancelled out exactly; no usable direction is left
        return EmbeddingVector::zeros(dimension);
    }
    for a in &mut acc {
        *a /= norm;
    }
    EmbeddingVector::new(acc).expect("hash embedding components are finite")
}

/// Open-vocabulary fallback provider backed by [`hash_embed`].
#[derive(Debug, Clone, Copy)]
pub struct HashProvider {
    dimension: usize,
}

impl HashProvider {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "hash embedding dimension must be positive");
        HashProvider { dimension }
    }
}

impl Default for HashProvider {
    fn default() -> Self {
        HashProvider::new(DEFAULT_HASH_DIMENSION)
    }
}

impl EmbeddingProvider for HashProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn vocabulary(&self) -> Vocabulary {
        Vocabulary::Open
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        Ok(texts
            .iter()
            .map(|t| Some(hash_embed(t, self.dimension)))
            .collect())
    }
}
