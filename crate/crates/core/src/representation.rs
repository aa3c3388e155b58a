//! Vector representations of columns (from instances) and tables (from
//! labels).

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::embedding::{embed_texts, preprocess_label, similarity_score, EmbeddingProvider, EmbeddingVector, TextPrepConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::sampling::{sample, split_half, SamplingConfig, SplitPattern};
use crate::schema::{Attribute, AttributeRef, Schema, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRepresentation {
    pub vector: EmbeddingVector,
    /// Sampled instances that contributed a vector.
    pub sampled_count: usize,
    pub source: AttributeRef,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSchemaRepresentation {
    pub vector: EmbeddingVector,
    pub source: String,
    /// Set when every label was out of vocabulary.
    pub empty: bool,
}

/// Mean vector of a bag of texts. Texts are grouped and visited in bytewise
/// order, so the result does not depend on the order of `texts`; a bag of one
/// repeated text yields exactly that text's vector.
pub fn mean_of_texts(
    provider: &dyn EmbeddingProvider,
    texts: &[&str],
) -> Result<Option<(EmbeddingVector, usize)>> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in texts {
        *counts.entry(t).or_default() += 1;
    }
    let keys: Vec<&str> = counts.keys().copied().collect();
    let vectors = embed_texts(provider, &keys)?;
    let total: usize = counts
        .values()
        .zip(&vectors)
        .filter(|(_, v)| v.is_some())
        .map(|(c, _)| *c)
        .sum();
    if total == 0 {
        return Ok(None);
    }
    let mut acc = vec![0.0f64; provider.dimension()];
    for (count, v) in counts.values().zip(&vectors) {
        if let Some(v) = v {
            let w = *count as f64 / total as f64;
            for (a, c) in acc.iter_mut().zip(v.as_slice()) {
                *a += w * c;
            }
        }
    }
    Ok(Some((EmbeddingVector::new(acc)?, total)))
}

/// Samples a column and averages the embeddings of the sampled instances.
pub fn column_representation(
    provider: &dyn EmbeddingProvider,
    table: &str,
    attribute: &Attribute,
    cfg: &SamplingConfig,
) -> Result<ColumnRepresentation> {
    let sampled = sample(&attribute.instances, cfg)?;
    let source = AttributeRef::new(table, &attribute.name);
    Ok(match mean_of_texts(provider, &sampled)? {
        Some((vector, sampled_count)) => ColumnRepresentation {
            vector,
            sampled_count,
            source,
            empty: false,
        },
        None => ColumnRepresentation {
            vector: EmbeddingVector::zeros(provider.dimension()),
            sampled_count: 0,
            source,
            empty: true,
        },
    })
}

/// Equally weighted combination of the table name and every attribute name,
/// L2-normalized.
pub fn table_schema_representation(
    provider: &dyn EmbeddingProvider,
    table: &Table,
    prep: &TextPrepConfig,
) -> Result<TableSchemaRepresentation> {
    let mut labels: Vec<String> = std::iter::once(&table.name)
        .chain(table.attributes.iter().map(|a| &a.name))
        .map(|l| preprocess_label(l, prep).join(" "))
        .collect();
    labels.sort_unstable();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let vectors = embed_texts(provider, &refs)?;
    let present: Vec<&EmbeddingVector> = vectors.iter().flatten().collect();
    if present.is_empty() {
        return Ok(TableSchemaRepresentation {
            vector: EmbeddingVector::zeros(provider.dimension()),
            source: table.name.clone(),
            empty: true,
        });
    }
    let mut acc = vec![0.0f64; provider.dimension()];
    for v in &present {
        for (a, c) in acc.iter_mut().zip(v.as_slice()) {
            *a += c;
        }
    }
    let n = present.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    let mean = EmbeddingVector::new(acc)?;
    Ok(TableSchemaRepresentation {
        empty: mean.is_zero(),
        vector: mean.normalized(),
        source: table.name.clone(),
    })
}

/// Self-similarity of a column: build vectors from two halves of its
/// instances and compare them.
pub fn representation_robustness(
    provider: &dyn EmbeddingProvider,
    attribute: &Attribute,
    pattern: SplitPattern,
    seed: u64,
) -> Result<f64> {
    let (a, b) = split_half(&attribute.instances, pattern, seed)?;
    let dim = provider.dimension();
    let va = mean_of_texts(provider, &a)?.map_or_else(|| EmbeddingVector::zeros(dim), |r| r.0);
    let vb = mean_of_texts(provider, &b)?.map_or_else(|| EmbeddingVector::zeros(dim), |r| r.0);
    similarity_score(&va, &vb)
}

/// Column representations of one schema, keyed by qualified attribute name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColumnStore {
    pub sampling_digest: String,
    columns: HashMap<AttributeRef, ColumnRepresentation>,
}

pub fn sampling_digest(cfg: &SamplingConfig) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(cfg).expect("sampling config serializes");
    Sha256::digest(&bytes)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    schema: String,
    sampling_digest: String,
    #[serde(flatten)]
    column: ColumnRepresentation,
}

impl ColumnStore {
    /// Represents every attribute that takes part in instance matching.
    pub fn build(
        provider: &dyn EmbeddingProvider,
        schema: &Schema,
        cfg: &SamplingConfig,
        execution: Execution,
    ) -> Result<Self> {
        let work: Vec<(&str, &Attribute)> = schema
            .tables
            .iter()
            .flat_map(|t| t.attributes.iter().map(move |a| (t.name.as_str(), a)))
            .filter(|(_, a)| a.participates_in_instance_matching())
            .collect();
        let reps = exec::try_map(execution, &work, |(table, attr)| {
            column_representation(provider, table, attr, cfg)
        })?;
        Ok(ColumnStore {
            sampling_digest: sampling_digest(cfg),
            columns: reps.into_iter().map(|r| (r.source.clone(), r)).collect(),
        })
    }

    pub fn get(&self, table: &str, attribute: &str) -> Option<&ColumnRepresentation> {
        self.columns.get(&AttributeRef::new(table, attribute))
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn insert(&mut self, rep: ColumnRepresentation) {
        self.columns.insert(rep.source.clone(), rep);
    }

    /// Representations sorted by source, for stable output.
    pub fn sorted(&self) -> Vec<&ColumnRepresentation> {
        let mut v: Vec<&ColumnRepresentation> = self.columns.values().collect();
        v.sort_by(|a, b| a.source.cmp(&b.source));
        v
    }

    /// Writes one JSON record per representation.
    pub fn write_jsonl<W: Write>(&self, schema: &str, mut out: W) -> std::io::Result<()> {
        for rep in self.sorted() {
            let rec = CacheRecord {
                schema: schema.to_string(),
                sampling_digest: self.sampling_digest.clone(),
                column: rep.clone(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads the records of `schema` back; records of other schemata are
    /// skipped. `origin` names the source in error messages.
    pub fn read_jsonl<R: BufRead>(input: R, schema: &str, origin: &str) -> Result<Self> {
        let mut store = ColumnStore::default();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CacheRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                location: format!("{origin}: line {}", i + 1),
                message: e.to_string(),
            })?;
            if rec.schema != schema {
                continue;
            }
            if store.columns.is_empty() {
                store.sampling_digest = rec.sampling_digest.clone();
            } else if store.sampling_digest != rec.sampling_digest {
                return Err(Error::validation(format!(
                    "{origin}: mixed sampling configurations in one cache"
                )));
            }
            store.insert(rec.column);
        }
        Ok(store)
    }
}
