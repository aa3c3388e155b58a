//! Table matching: scored candidate table pairs from schema labels, column
//! contents, or schema labels refined by column contents.

use serde::{Deserialize, Serialize};

use crate::config::{MatchConfig, TableStrategy, TopN};
use crate::embedding::{similarity_score, EmbeddingProvider, TextPrepConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::representation::{column_representation, table_schema_representation, ColumnRepresentation, ColumnStore, TableSchemaRepresentation};
use crate::schema::{Schema, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Schema,
    Instance,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    Proposed,
    Confirmed,
    Rejected,
}

/// One attribute pair that supported an instance-based table candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeEvidence {
    pub source_attribute: String,
    pub target_attribute: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCandidate {
    pub id: String,
    pub source_table: String,
    pub target_table: String,
    pub score: f64,
    pub provenance: Provenance,
    /// (forward, backward) attribute match ratios, instance evidence only.
    pub direction_ratios: Option<(f64, f64)>,
    pub status: CandidateStatus,
    /// Best supporting attribute pairs, highest score first.
    #[serde(default)]
    pub evidence: Vec<AttributeEvidence>,
}

impl TableCandidate {
    pub fn pair(&self) -> (String, String) {
        (self.source_table.clone(), self.target_table.clone())
    }

    fn transition(&mut self, to: CandidateStatus) -> Result<()> {
        if self.status != CandidateStatus::Proposed {
            return Err(Error::Conflict(format!(
                "candidate {} is already {:?}",
                self.id, self.status
            )));
        }
        self.status = to;
        Ok(())
    }

    pub fn confirm(&mut self) -> Result<()> {
        self.transition(CandidateStatus::Confirmed)
    }

    pub fn reject(&mut self) -> Result<()> {
        self.transition(CandidateStatus::Rejected)
    }
}

/// Candidates plus everything computed on the way that later steps reuse.
#[derive(Debug, Clone, Default)]
pub struct TableMatchOutcome {
    pub candidates: Vec<TableCandidate>,
    /// Tables skipped for lack of comparable columns, and similar notes.
    pub diagnostics: Vec<String>,
    pub source_columns: Option<ColumnStore>,
    pub target_columns: Option<ColumnStore>,
}

const EVIDENCE_LIMIT: usize = 5;

fn require_tables(source: &Schema, target: &Schema) -> Result<()> {
    if source.tables.is_empty() || target.tables.is_empty() {
        return Err(Error::contract("table matching needs two non-empty schemata"));
    }
    Ok(())
}

/// Gives candidates stable ids in list order.
pub fn assign_ids(candidates: &mut [TableCandidate]) {
    for (i, c) in candidates.iter_mut().enumerate() {
        c.id = format!("c{i:04}");
    }
}

fn sort_per_target(list: &mut [TableCandidate]) {
    list.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.source_table.cmp(&b.source_table))
    });
}

pub fn table_representations(
    provider: &dyn EmbeddingProvider,
    schema: &Schema,
    prep: &TextPrepConfig,
    execution: Execution,
) -> Result<Vec<TableSchemaRepresentation>> {
    exec::try_map(execution, &schema.tables, |t| {
        table_schema_representation(provider, t, prep)
    })
}

/// For every target table, the source tables whose label representation
/// scores at least `t`, best first, at most `n` of them.
pub fn schema_based_candidates(
    source: &Schema,
    target: &Schema,
    provider: &dyn EmbeddingProvider,
    prep: &TextPrepConfig,
    t: f64,
    n: TopN,
    execution: Execution,
) -> Result<Vec<TableCandidate>> {
    require_tables(source, target)?;
    let src = table_representations(provider, source, prep, execution)?;
    let tgt = table_representations(provider, target, prep, execution)?;
    let per_target = exec::try_map(execution, &tgt, |tr| {
        let mut list = Vec::new();
        for sr in &src {
            let score = similarity_score(&sr.vector, &tr.vector)?;
            if score >= t {
                list.push(TableCandidate {
                    id: String::new(),
                    source_table: sr.source.clone(),
                    target_table: tr.source.clone(),
                    score,
                    provenance: Provenance::Schema,
                    direction_ratios: None,
                    status: CandidateStatus::Proposed,
                    evidence: Vec::new(),
                });
            }
        }
        sort_per_target(&mut list);
        if let Some(limit) = n.0 {
            list.truncate(limit);
        }
        Ok(list)
    })?;
    let mut all: Vec<TableCandidate> = per_target.into_iter().flatten().collect();
    assign_ids(&mut all);
    Ok(all)
}

/// Attribute-level evidence for one table pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEvidence {
    pub forward: f64,
    pub backward: f64,
    /// Mean score of the matched attribute pairs, 0 if none matched.
    pub score: f64,
    pub matched: Vec<AttributeEvidence>,
}

fn columns_of<'a>(table: &Table, store: &'a ColumnStore) -> Vec<&'a ColumnRepresentation> {
    let mut cols: Vec<&ColumnRepresentation> = table
        .attributes
        .iter()
        .filter_map(|a| store.get(&table.name, &a.name))
        .collect();
    cols.sort_by(|a, b| a.source.attribute.cmp(&b.source.attribute));
    cols
}

/// Compares the participating columns of two tables in both directions.
///
/// Each target column is paired with its best source column (a source column
/// may serve several targets) and vice versa. The forward ratio is the
/// fraction of target columns whose best pair reaches `t_a`; the backward
/// ratio is the same for source columns. Returns `None` when either table has
/// no participating column.
pub fn instance_pair_evidence(
    source_table: &Table,
    target_table: &Table,
    source_store: &ColumnStore,
    target_store: &ColumnStore,
    t_a: f64,
) -> Result<Option<PairEvidence>> {
    let src = columns_of(source_table, source_store);
    let tgt = columns_of(target_table, target_store);
    if src.is_empty() || tgt.is_empty() {
        return Ok(None);
    }
    let mut scores = vec![vec![0.0f64; tgt.len()]; src.len()];
    for (i, s) in src.iter().enumerate() {
        for (j, t) in tgt.iter().enumerate() {
            scores[i][j] = similarity_score(&s.vector, &t.vector)?;
        }
    }
    // rows and columns are in name order, so the first maximum wins ties
    let best_in = |values: &mut dyn Iterator<Item = f64>| -> (usize, f64) {
        values
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best })
    };
    let mut matched_pairs: Vec<(usize, usize)> = Vec::new();
    let mut forward_hits = 0usize;
    for j in 0..tgt.len() {
        let (i, v) = best_in(&mut (0..src.len()).map(|i| scores[i][j]));
        if v >= t_a {
            forward_hits += 1;
            matched_pairs.push((i, j));
        }
    }
    let mut backward_hits = 0usize;
    for (i, row) in scores.iter().enumerate() {
        let (j, v) = best_in(&mut row.iter().copied());
        if v >= t_a {
            backward_hits += 1;
            matched_pairs.push((i, j));
        }
    }
    matched_pairs.sort_unstable();
    matched_pairs.dedup();
    let score = if matched_pairs.is_empty() {
        0.0
    } else {
        matched_pairs.iter().map(|&(i, j)| scores[i][j]).sum::<f64>() / matched_pairs.len() as f64
    };
    let mut matched: Vec<AttributeEvidence> = matched_pairs
        .iter()
        .map(|&(i, j)| AttributeEvidence {
            source_attribute: src[i].source.attribute.clone(),
            target_attribute: tgt[j].source.attribute.clone(),
            score: scores[i][j],
        })
        .collect();
    matched.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(Some(PairEvidence {
        forward: forward_hits as f64 / tgt.len() as f64,
        backward: backward_hits as f64 / src.len() as f64,
        score,
        matched,
    }))
}

fn build_stores(
    source: &Schema,
    target: &Schema,
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
) -> Result<(ColumnStore, ColumnStore)> {
    let s = ColumnStore::build(provider, source, &cfg.sampling, cfg.execution)?;
    let t = ColumnStore::build(provider, target, &cfg.sampling, cfg.execution)?;
    Ok((s, t))
}

fn skipped_tables(schema: &Schema, store: &ColumnStore, side: &str) -> Vec<String> {
    schema
        .tables
        .iter()
        .filter(|t| columns_of(t, store).is_empty())
        .map(|t| format!("{side} table `{}` has no textual instance columns and was skipped", t.name))
        .collect()
}

/// Refines (or, with `pairs == None`, enumerates) table pairs by column
/// evidence; grouped by target table in schema order.
fn instance_refinement(
    source: &Schema,
    target: &Schema,
    source_store: &ColumnStore,
    target_store: &ColumnStore,
    pairs: Option<&[TableCandidate]>,
    cfg: &MatchConfig,
    provenance: Provenance,
) -> Result<Vec<TableCandidate>> {
    let per_target = exec::try_map(cfg.execution, &target.tables, |tt| {
        let sources: Vec<&Table> = match pairs {
            None => source.tables.iter().collect(),
            Some(pairs) => pairs
                .iter()
                .filter(|c| c.target_table == tt.name)
                .filter_map(|c| source.table(&c.source_table))
                .collect(),
        };
        let mut list = Vec::new();
        for st in sources {
            let Some(ev) = instance_pair_evidence(st, tt, source_store, target_store, cfg.t_a)? else {
                continue;
            };
            if ev.forward.max(ev.backward) >= cfg.col_ratio {
                list.push(TableCandidate {
                    id: String::new(),
                    source_table: st.name.clone(),
                    target_table: tt.name.clone(),
                    score: ev.score,
                    provenance,
                    direction_ratios: Some((ev.forward, ev.backward)),
                    status: CandidateStatus::Proposed,
                    evidence: ev.matched.into_iter().take(EVIDENCE_LIMIT).collect(),
                });
            }
        }
        sort_per_target(&mut list);
        Ok(list)
    })?;
    let mut all: Vec<TableCandidate> = per_target.into_iter().flatten().collect();
    assign_ids(&mut all);
    Ok(all)
}

/// Instance-based table matching over all table pairs.
pub fn instance_based_candidates(
    source: &Schema,
    target: &Schema,
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
) -> Result<TableMatchOutcome> {
    require_tables(source, target)?;
    let (ss, ts) = build_stores(source, target, provider, cfg)?;
    let candidates = instance_refinement(source, target, &ss, &ts, None, cfg, Provenance::Instance)?;
    let mut diagnostics = skipped_tables(source, &ss, "source");
    diagnostics.extend(skipped_tables(target, &ts, "target"));
    Ok(TableMatchOutcome {
        candidates,
        diagnostics,
        source_columns: Some(ss),
        target_columns: Some(ts),
    })
}

/// Schema-based pruning with `(t, n)` followed by instance-based refinement
/// of the surviving pairs.
pub fn combined_candidates(
    source: &Schema,
    target: &Schema,
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
) -> Result<TableMatchOutcome> {
    let phase_one = schema_based_candidates(source, target, provider, &cfg.text_prep, cfg.t, cfg.n, cfg.execution)?;
    let (ss, ts) = build_stores(source, target, provider, cfg)?;
    let candidates = instance_refinement(source, target, &ss, &ts, Some(&phase_one), cfg, Provenance::Combined)?;
    let mut diagnostics = skipped_tables(source, &ss, "source");
    diagnostics.extend(skipped_tables(target, &ts, "target"));
    Ok(TableMatchOutcome {
        candidates,
        diagnostics,
        source_columns: Some(ss),
        target_columns: Some(ts),
    })
}

/// Runs the strategy selected in the configuration.
pub fn match_tables(
    source: &Schema,
    target: &Schema,
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
) -> Result<TableMatchOutcome> {
    cfg.validate()?;
    match cfg.strategy {
        TableStrategy::Schema => Ok(TableMatchOutcome {
            candidates: schema_based_candidates(source, target, provider, &cfg.text_prep, cfg.t, cfg.n, cfg.execution)?,
            ..TableMatchOutcome::default()
        }),
        TableStrategy::Instance => instance_based_candidates(source, target, provider, cfg),
        TableStrategy::Combined => combined_candidates(source, target, provider, cfg),
    }
}

/// Mean of the attribute-pair scores at or above `pair_cutoff`; 0 when no
/// pair survives.
pub fn averaged_similarity_from_scores(scores: &[Vec<f64>], pair_cutoff: f64) -> f64 {
    let kept: Vec<f64> = scores
        .iter()
        .flatten()
        .copied()
        .filter(|&s| s >= pair_cutoff)
        .collect();
    if kept.is_empty() {
        0.0
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    }
}

/// Table similarity as the filtered average over all attribute-pair scores.
pub fn averaged_table_similarity(
    table_a: &Table,
    table_b: &Table,
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
) -> Result<f64> {
    let reps = |t: &Table| -> Result<Vec<ColumnRepresentation>> {
        t.attributes
            .iter()
            .filter(|a| a.participates_in_instance_matching())
            .map(|a| column_representation(provider, &t.name, a, &cfg.sampling))
            .collect()
    };
    let ra = reps(table_a)?;
    let rb = reps(table_b)?;
    if ra.is_empty() || rb.is_empty() {
        return Err(Error::contract(
            "averaged table similarity needs a participating attribute on both sides",
        ));
    }
    let mut scores = Vec::with_capacity(ra.len());
    for a in &ra {
        scores.push(
            rb.iter()
                .map(|b| similarity_score(&a.vector, &b.vector))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok(averaged_similarity_from_scores(&scores, cfg.pair_cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::HashProvider;
    use crate::schema::Attribute;

    fn geo() -> Schema {
        Schema::new(
            "geo",
            vec![
                Table::new("country")
                    .with_attribute(Attribute::new("name").with_instances(["France", "Peru", "Japan", "Chile"]))
                    .with_attribute(Attribute::new("capital").with_instances(["Paris", "Lima", "Tokyo", "Santiago"]))
                    .with_attribute(Attribute::new("population").with_instances(["67", "33", "125", "19"])),
                Table::new("river")
                    .with_attribute(Attribute::new("river_name").with_instances(["Seine", "Amazon", "Shinano", "Loa"]))
                    .with_attribute(Attribute::new("sea").with_instances(["Atlantic", "Pacific", "Japan Sea"])),
                Table::new("volcano").with_attribute(Attribute::new("height").with_instances(["3776", "5897"])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn self_match_schema_based() {
        let s = geo();
        let cands = schema_based_candidates(&s, &s, &HashProvider::default(), &TextPrepConfig::default(), 1.0, TopN::limit(1), Execution::Parallel).unwrap();
        assert_eq!(cands.len(), 3);
        for c in &cands {
            assert_eq!(c.source_table, c.target_table);
            assert_eq!(c.score, 1.0);
        }
    }

    #[test]
    fn threshold_one_removes_imperfect_pairs() {
        let s = geo();
        let mut other = geo();
        other.tables[0].name = "nation".into();
        let cands = schema_based_candidates(&s, &other, &HashProvider::default(), &TextPrepConfig::default(), 1.0, TopN::UNLIMITED, Execution::Sequential).unwrap();
        assert!(cands.iter().all(|c| c.target_table != "nation"));
    }

    #[test]
    fn empty_schema_is_contract_error() {
        let s = geo();
        let empty = Schema::new("e", vec![]).unwrap();
        let p = HashProvider::default();
        assert!(schema_based_candidates(&s, &empty, &p, &TextPrepConfig::default(), 0.5, TopN::limit(8), Execution::Parallel).is_err());
    }

    #[test]
    fn identical_instances_full_ratios() {
        let s = geo();
        let p = HashProvider::default();
        let out = instance_based_candidates(&s, &s, &p, &MatchConfig::default()).unwrap();
        let c = out.candidates.iter().find(|c| c.source_table == "country" && c.target_table == "country").unwrap();
        assert_eq!(c.direction_ratios, Some((1.0, 1.0)));
        assert_eq!(c.score, 1.0);
        assert!(out.diagnostics.iter().any(|d| d.contains("volcano")));
        assert!(out.candidates.iter().all(|c| c.source_table != "volcano"));
    }

    #[test]
    fn col_ratio_zero_emits_every_comparable_pair() {
        let s = geo();
        let cfg = MatchConfig { col_ratio: 0.0, ..MatchConfig::default() };
        let out = instance_based_candidates(&s, &s, &HashProvider::default(), &cfg).unwrap();
        // country and river on each side are comparable
        assert_eq!(out.candidates.len(), 4);
    }

    #[test]
    fn combined_with_open_phase_one_equals_instance() {
        let s = geo();
        let p = HashProvider::default();
        let cfg = MatchConfig { t: 0.0, n: TopN::UNLIMITED, col_ratio: 0.0, ..MatchConfig::default() };
        let a = instance_based_candidates(&s, &s, &p, &cfg).unwrap().candidates;
        let b = combined_candidates(&s, &s, &p, &cfg).unwrap().candidates;
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((&x.source_table, &x.target_table, x.score, x.direction_ratios), (&y.source_table, &y.target_table, y.score, y.direction_ratios));
            assert_eq!(y.provenance, Provenance::Combined);
        }
    }

    #[test]
    fn averaged_scores_example() {
        let m = vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.05, 0.0]];
        assert!((averaged_similarity_from_scores(&m, 0.5) - 0.85).abs() < 1e-12);
        let grand = m.iter().flatten().sum::<f64>() / 6.0;
        assert!((averaged_similarity_from_scores(&m, 0.0) - grand).abs() < 1e-12);
        assert_eq!(averaged_similarity_from_scores(&m, 0.95), 0.0);
    }

    #[test]
    fn averaged_identical_tables() {
        let s = geo();
        let t = s.table("river").unwrap();
        let cfg = MatchConfig { pair_cutoff: 0.99, ..MatchConfig::default() };
        let v = averaged_table_similarity(t, t, &HashProvider::default(), &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(averaged_table_similarity(s.table("volcano").unwrap(), t, &HashProvider::default(), &cfg).is_err());
    }

    #[test]
    fn status_transitions() {
        let s = geo();
        let mut c = schema_based_candidates(&s, &s, &HashProvider::default(), &TextPrepConfig::default(), 0.9, TopN::limit(1), Execution::Parallel).unwrap().remove(0);
        c.confirm().unwrap();
        assert!(matches!(c.reject(), Err(Error::Conflict(_))));
    }
}
