//! Attribute matching inside the surviving table pairs: score matrices per
//! evidence type, correspondence selection, and rejection of table pairs
//! without support.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::config::{MatchConfig, MatcherKind, SelectionMode};
use crate::embedding::{
    aggregate_mean, aggregate_sum, coherent_group_score, embed_texts, preprocess_label, similarity_score,
    EmbeddingProvider, EmbeddingVector, LabelAggregation, TextPrepConfig,
};
use crate::error::Result;
use crate::exec;
use crate::representation::{column_representation, ColumnStore};
use crate::sampling::SamplingConfig;
use crate::schema::{AttributeRef, Schema, Table};
use crate::table_matcher::{CandidateStatus, TableCandidate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeCorrespondence {
    pub source: AttributeRef,
    pub target: AttributeRef,
    pub score: f64,
    pub matcher: MatcherKind,
}

/// Scores of every source attribute (rows) against every target attribute
/// (columns) of one table pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub source_table: String,
    pub target_table: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(
        source_table: impl Into<String>,
        target_table: impl Into<String>,
        rows: Vec<String>,
        cols: Vec<String>,
        cells: Vec<Vec<f64>>,
    ) -> Self {
        debug_assert_eq!(cells.len(), rows.len());
        debug_assert!(cells.iter().all(|r| r.len() == cols.len()));
        ScoreMatrix {
            source_table: source_table.into(),
            target_table: target_table.into(),
            rows,
            cols,
            cells,
        }
    }

    fn from_fn(
        a: &Table,
        b: &Table,
        mut cell: impl FnMut(usize, usize) -> Result<f64>,
    ) -> Result<Self> {
        let mut cells = vec![vec![0.0; b.attributes.len()]; a.attributes.len()];
        for (i, row) in cells.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = cell(i, j)?;
            }
        }
        Ok(ScoreMatrix::new(
            &a.name,
            &b.name,
            a.attributes.iter().map(|x| x.name.clone()).collect(),
            b.attributes.iter().map(|x| x.name.clone()).collect(),
            cells,
        ))
    }

    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.rows.iter().position(|r| r == row)?;
        let j = self.cols.iter().position(|c| c == col)?;
        Some(self.cells[i][j])
    }
}

fn score_or_zero(a: Option<&EmbeddingVector>, b: Option<&EmbeddingVector>) -> Result<f64> {
    match (a, b) {
        (Some(a), Some(b)) => similarity_score(a, b),
        _ => Ok(0.0),
    }
}

struct LabelEmbedding {
    whole: Option<EmbeddingVector>,
    words: Vec<Option<EmbeddingVector>>,
}

fn embed_labels(
    table: &Table,
    provider: &dyn EmbeddingProvider,
    prep: &TextPrepConfig,
) -> Result<Vec<LabelEmbedding>> {
    let tokens: Vec<Vec<String>> = table
        .attributes
        .iter()
        .map(|a| preprocess_label(&a.name, prep))
        .collect();
    let joined: Vec<String> = tokens.iter().map(|t| t.join(" ")).collect();
    let mut texts: Vec<&str> = joined.iter().map(String::as_str).collect();
    for t in &tokens {
        texts.extend(t.iter().map(String::as_str));
    }
    let mut vectors = embed_texts(provider, &texts)?.into_iter();
    let wholes: Vec<Option<EmbeddingVector>> = vectors.by_ref().take(joined.len()).collect();
    Ok(wholes
        .into_iter()
        .zip(&tokens)
        .map(|(whole, t)| LabelEmbedding {
            whole,
            words: vectors.by_ref().take(t.len()).collect(),
        })
        .collect())
}

fn aggregated(words: &[Option<EmbeddingVector>], sum: bool) -> Result<Option<EmbeddingVector>> {
    let present: Vec<&EmbeddingVector> = words.iter().flatten().collect();
    if present.is_empty() {
        return Ok(None);
    }
    let owned: Vec<EmbeddingVector> = present.into_iter().cloned().collect();
    Ok(Some(if sum { aggregate_sum(&owned)? } else { aggregate_mean(&owned)? }))
}

/// Name-based scores. With whole-label aggregation, a label the provider
/// cannot embed falls back to Coherent Groups over its words, and to 0 when
/// that is undefined as well.
pub fn name_based_similarities(
    table_a: &Table,
    table_b: &Table,
    provider: &dyn EmbeddingProvider,
    prep: &TextPrepConfig,
    aggregation: LabelAggregation,
) -> Result<ScoreMatrix> {
    let la = embed_labels(table_a, provider, prep)?;
    let lb = embed_labels(table_b, provider, prep)?;
    match aggregation {
        LabelAggregation::Whole => ScoreMatrix::from_fn(table_a, table_b, |i, j| {
            match (&la[i].whole, &lb[j].whole) {
                (Some(a), Some(b)) => similarity_score(a, b),
                _ => coherent_group_score(&la[i].words, &lb[j].words),
            }
        }),
        LabelAggregation::CoherentGroups => ScoreMatrix::from_fn(table_a, table_b, |i, j| {
            coherent_group_score(&la[i].words, &lb[j].words)
        }),
        LabelAggregation::Sum | LabelAggregation::Mean => {
            let sum = aggregation == LabelAggregation::Sum;
            let va = la.iter().map(|l| aggregated(&l.words, sum)).collect::<Result<Vec<_>>>()?;
            let vb = lb.iter().map(|l| aggregated(&l.words, sum)).collect::<Result<Vec<_>>>()?;
            ScoreMatrix::from_fn(table_a, table_b, |i, j| score_or_zero(va[i].as_ref(), vb[j].as_ref()))
        }
    }
}

/// Scores of whole-comment embeddings; attributes without a comment score 0.
pub fn comment_based_similarities(
    table_a: &Table,
    table_b: &Table,
    provider: &dyn EmbeddingProvider,
) -> Result<ScoreMatrix> {
    let embed = |t: &Table| -> Result<Vec<Option<EmbeddingVector>>> {
        let texts: Vec<&str> = t
            .attributes
            .iter()
            .map(|a| a.comment.as_deref().unwrap_or(""))
            .collect();
        embed_texts(provider, &texts)
    };
    let ca = embed(table_a)?;
    let cb = embed(table_b)?;
    ScoreMatrix::from_fn(table_a, table_b, |i, j| score_or_zero(ca[i].as_ref(), cb[j].as_ref()))
}

/// Scores of column representations. Representations from `stores`
/// (source, target) are reused when present. Numeric and empty attributes
/// score 0.
pub fn instance_based_similarities(
    table_a: &Table,
    table_b: &Table,
    provider: &dyn EmbeddingProvider,
    sampling: &SamplingConfig,
    stores: Option<(&ColumnStore, &ColumnStore)>,
) -> Result<ScoreMatrix> {
    let reps = |t: &Table, store: Option<&ColumnStore>| -> Result<Vec<Option<EmbeddingVector>>> {
        t.attributes
            .iter()
            .map(|a| {
                if !a.participates_in_instance_matching() {
                    return Ok(None);
                }
                if let Some(rep) = store.and_then(|s| s.get(&t.name, &a.name)) {
                    return Ok(Some(rep.vector.clone()));
                }
                Ok(Some(column_representation(provider, &t.name, a, sampling)?.vector))
            })
            .collect()
    };
    let ra = reps(table_a, stores.map(|s| s.0))?;
    let rb = reps(table_b, stores.map(|s| s.1))?;
    ScoreMatrix::from_fn(table_a, table_b, |i, j| score_or_zero(ra[i].as_ref(), rb[j].as_ref()))
}

fn correspondence(m: &ScoreMatrix, i: usize, j: usize, matcher: MatcherKind) -> AttributeCorrespondence {
    AttributeCorrespondence {
        source: AttributeRef::new(&m.source_table, &m.rows[i]),
        target: AttributeRef::new(&m.target_table, &m.cols[j]),
        score: m.cells[i][j],
        matcher,
    }
}

/// Picks correspondences from a score matrix.
///
/// * `Threshold`: every cell at or above `attr_threshold`, row-major.
/// * `TopK(k)`: per target column the k best cells with a positive score,
///   ties broken by source name.
/// * `OneToOne`: repeatedly takes the best remaining cell at or above the
///   threshold and removes its row and column; ties broken by (source,
///   target) name.
pub fn select_correspondences(
    matrix: &ScoreMatrix,
    mode: SelectionMode,
    attr_threshold: f64,
    matcher: MatcherKind,
) -> Vec<AttributeCorrespondence> {
    let m = matrix;
    match mode {
        SelectionMode::Threshold => {
            let mut out = Vec::new();
            for i in 0..m.rows.len() {
                for j in 0..m.cols.len() {
                    if m.cells[i][j] >= attr_threshold {
                        out.push(correspondence(m, i, j, matcher));
                    }
                }
            }
            out
        }
        SelectionMode::TopK(k) => {
            let mut out = Vec::new();
            for j in 0..m.cols.len() {
                let mut col: Vec<usize> = (0..m.rows.len()).filter(|&i| m.cells[i][j] > 0.0).collect();
                col.sort_by(|&a, &b| {
                    m.cells[b][j]
                        .total_cmp(&m.cells[a][j])
                        .then_with(|| m.rows[a].cmp(&m.rows[b]))
                });
                out.extend(col.into_iter().take(k).map(|i| correspondence(m, i, j, matcher)));
            }
            out
        }
        SelectionMode::OneToOne => {
            let mut cells: Vec<(usize, usize)> = (0..m.rows.len())
                .flat_map(|i| (0..m.cols.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| m.cells[i][j] >= attr_threshold)
                .collect();
            cells.sort_by(|&(ai, aj), &(bi, bj)| {
                m.cells[bi][bj]
                    .total_cmp(&m.cells[ai][aj])
                    .then_with(|| m.rows[ai].cmp(&m.rows[bi]))
                    .then_with(|| m.cols[aj].cmp(&m.cols[bj]))
            });
            let mut used_rows = HashSet::new();
            let mut used_cols = HashSet::new();
            let mut out = Vec::new();
            for (i, j) in cells {
                if !used_rows.contains(&i) && !used_cols.contains(&j) {
                    used_rows.insert(i);
                    used_cols.insert(j);
                    out.push(correspondence(m, i, j, matcher));
                }
            }
            out
        }
    }
}

/// Rejects every still-active candidate whose table pair received no
/// attribute correspondence.
pub fn reject_unsupported_table_matches(
    mut candidates: Vec<TableCandidate>,
    correspondences: &[AttributeCorrespondence],
) -> Vec<TableCandidate> {
    let supported: HashSet<(&str, &str)> = correspondences
        .iter()
        .map(|c| (c.source.table.as_str(), c.target.table.as_str()))
        .collect();
    for c in &mut candidates {
        if c.status != CandidateStatus::Rejected
            && !supported.contains(&(c.source_table.as_str(), c.target_table.as_str()))
        {
            c.status = CandidateStatus::Rejected;
        }
    }
    candidates
}

/// Runs the configured matchers on every non-rejected candidate and selects
/// correspondences. Output follows candidate order, then matcher order.
pub fn match_attributes(
    source: &Schema,
    target: &Schema,
    candidates: &[TableCandidate],
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
    stores: Option<(&ColumnStore, &ColumnStore)>,
) -> Result<Vec<AttributeCorrespondence>> {
    let active: Vec<&TableCandidate> = candidates
        .iter()
        .filter(|c| c.status != CandidateStatus::Rejected)
        .collect();
    let per_pair = exec::try_map(cfg.execution, &active, |c| {
        let (Some(a), Some(b)) = (source.table(&c.source_table), target.table(&c.target_table)) else {
            return Err(crate::Error::validation(format!(
                "candidate {} refers to unknown tables",
                c.id
            )));
        };
        let mut out = Vec::new();
        for &matcher in &cfg.matchers {
            let matrix = match matcher {
                MatcherKind::NameBased => {
                    name_based_similarities(a, b, provider, &cfg.text_prep, cfg.label_aggregation)?
                }
                MatcherKind::CommentBased => comment_based_similarities(a, b, provider)?,
                MatcherKind::InstanceBased => {
                    instance_based_similarities(a, b, provider, &cfg.sampling, stores)?
                }
            };
            out.extend(select_correspondences(&matrix, cfg.selection_mode, cfg.attr_threshold, matcher));
        }
        Ok(out)
    })?;
    Ok(per_pair.into_iter().flatten().collect())
}
