//! Embedding vectors, similarity and aggregation, text preprocessing and the
//! provider abstraction that turns text into vectors.

mod cache;
mod fixture;
mod groups;
mod hash;
mod provider;
#[cfg(feature = "remote")]
mod remote;
mod text;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cache::CachedProvider;
pub use fixture::FixtureProvider;
pub use groups::{coherent_group_score, coherent_group_similarity};
pub use hash::{fnv1a64, hash_embed, HashProvider, DEFAULT_HASH_DIMENSION};
pub use provider::{embed_text, embed_texts, normalize_lookup_key, EmbeddingProvider, Vocabulary};
#[cfg(feature = "remote")]
pub use remote::{RemoteProvider, RemoteProviderConfig};
pub use text::{preprocess_label, TextPrepConfig};

/// A fixed-dimension real vector. The zero vector stands for "no semantics"
/// (empty text, columns without usable values) and is similar to nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmbeddingVector(Vec<f64>);

impl TryFrom<Vec<f64>> for EmbeddingVector {
    type Error = Error;

    fn try_from(components: Vec<f64>) -> Result<Self> {
        EmbeddingVector::new(components)
    }
}

impl From<EmbeddingVector> for Vec<f64> {
    fn from(v: EmbeddingVector) -> Self {
        v.0
    }
}

impl EmbeddingVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(i) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::contract(format!(
                "embedding component {i} is not finite"
            )));
        }
        Ok(EmbeddingVector(components))
    }

    pub fn zeros(dimension: usize) -> Self {
        EmbeddingVector(vec![0.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Unit-length copy; the zero vector stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        EmbeddingVector(self.0.iter().map(|c| c / n).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EmbeddingVector(self.0.iter().map(|c| c * factor).collect())
    }
}

fn check_dimensions(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<()> {
    if a.dimension() != b.dimension() {
        return Err(Error::contract(format!(
            "dimension mismatch: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    Ok(())
}

/// Cosine of the angle between two vectors, 0 when either one is zero.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    check_dimensions(a, b)?;
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in a.0.iter().zip(&b.0) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    // sqrt(na * nb) is exactly na when a == b, so self-similarity is exactly 1
    let mut denom = (na * nb).sqrt();
    if denom == 0.0 || !denom.is_finite() {
        denom = na.sqrt() * nb.sqrt();
    }
    Ok((dot / denom).clamp(-1.0, 1.0))
}

/// Cosine clamped to [0, 1]; every threshold in the engine lives on this scale.
pub fn similarity_score(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    Ok(cosine_similarity(a, b)?.max(0.0))
}

pub fn aggregate_sum<V: AsRef<EmbeddingVector>>(vectors: &[V]) -> Result<EmbeddingVector> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::contract("cannot aggregate an empty list of vectors"))?
        .as_ref();
    let mut acc = first.0.clone();
    for v in &vectors[1..] {
        let v = v.as_ref();
        check_dimensions(first, v)?;
        for (a, c) in acc.iter_mut().zip(&v.0) {
            *a += c;
        }
    }
    Ok(EmbeddingVector(acc))
}

pub fn aggregate_mean<V: AsRef<EmbeddingVector>>(vectors: &[V]) -> Result<EmbeddingVector> {
    let sum = aggregate_sum(vectors)?;
    if vectors.len() == 1 {
        return Ok(sum);
    }
    let count = vectors.len() as f64;
    Ok(EmbeddingVector(sum.0.into_iter().map(|c| c / count).collect()))
}

impl AsRef<EmbeddingVector> for EmbeddingVector {
    fn as_ref(&self) -> &EmbeddingVector {
        self
    }
}

/// How a multi-word label is turned into a similarity.
///
/// `Whole` hands the full preprocessed label to the provider (the natural
/// choice for contextual models). `Sum` and `Mean` embed each word and
/// aggregate the vectors; `CoherentGroups` averages all word-pair scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelAggregation {
    #[default]
    Whole,
    Sum,
    Mean,
    CoherentGroups,
}

impl std::str::FromStr for LabelAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "whole" => Ok(LabelAggregation::Whole),
            "sum" => Ok(LabelAggregation::Sum),
            "mean" => Ok(LabelAggregation::Mean),
            "coherent_groups" | "cg" => Ok(LabelAggregation::CoherentGroups),
            other => Err(Error::validation(format!("unknown label aggregation `{other}`"))),
        }
    }
}
