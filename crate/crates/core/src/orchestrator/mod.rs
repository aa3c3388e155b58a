//! The two-step pipeline around a persistent run: table matching, optional
//! human review of the candidates, attribute matching, and reporting.

mod store;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::attribute_matcher::{match_attributes, reject_unsupported_table_matches, AttributeCorrespondence};
use crate::config::MatchConfig;
use crate::embedding::EmbeddingProvider;
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, EvalReport};
use crate::representation::ColumnStore;
use crate::schema::{AttributeRef, GoldAlignment, Schema};
use crate::table_matcher::{match_tables, CandidateStatus, TableCandidate};

pub use store::{RunLock, RunStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Created,
    TableMatchingDone,
    UnderReview,
    AttributeMatchingDone,
    Reported,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Created => "created",
            Phase::TableMatchingDone => "table_matching_done",
            Phase::UnderReview => "under_review",
            Phase::AttributeMatchingDone => "attribute_matching_done",
            Phase::Reported => "reported",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Confirm,
    Reject,
}

impl FromStr for Decision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "confirm" | "c" | "y" => Ok(Decision::Confirm),
            "reject" | "r" | "n" => Ok(Decision::Reject),
            other => Err(Error::validation(format!("unknown decision `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub sequence: u64,
    pub candidate_id: String,
    pub decision: Decision,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub table_level: EvalReport,
    pub attribute_level: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    pub run_id: String,
    pub phase: Phase,
    pub config: MatchConfig,
    pub source: Schema,
    pub target: Schema,
    #[serde(default)]
    pub gold: Option<GoldAlignment>,
    #[serde(default)]
    pub candidates: Vec<TableCandidate>,
    #[serde(default)]
    pub correspondences: Vec<AttributeCorrespondence>,
    #[serde(default)]
    pub decisions_log: Vec<DecisionRecord>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default)]
    pub report: Option<RunReport>,
    /// Column representations kept from the table step for reuse.
    #[serde(skip)]
    pub source_columns: Option<ColumnStore>,
    #[serde(skip)]
    pub target_columns: Option<ColumnStore>,
}

/// Run ids become directory names, so only a conservative alphabet is allowed.
pub fn validate_run_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::validation(format!("invalid run id `{id}`")))
    }
}

impl RunState {
    pub fn new(
        run_id: impl Into<String>,
        source: Schema,
        target: Schema,
        gold: Option<GoldAlignment>,
        config: MatchConfig,
    ) -> Result<Self> {
        let run_id = run_id.into();
        validate_run_id(&run_id)?;
        config.validate()?;
        source.validate()?;
        target.validate()?;
        if let Some(g) = &gold {
            g.validate(&source, &target)?;
        }
        Ok(RunState {
            run_id,
            phase: Phase::Created,
            config,
            source,
            target,
            gold,
            candidates: Vec::new(),
            correspondences: Vec::new(),
            decisions_log: Vec::new(),
            diagnostics: Vec::new(),
            report: None,
            source_columns: None,
            target_columns: None,
        })
    }

    fn require(&self, allowed: &[Phase], action: &str) -> Result<()> {
        if allowed.contains(&self.phase) {
            Ok(())
        } else {
            Err(Error::Phase {
                phase: self.phase.to_string(),
                message: format!("{action} is not possible now"),
            })
        }
    }

    pub fn candidate(&self, id: &str) -> Option<&TableCandidate> {
        self.candidates.iter().find(|c| c.id == id)
    }

    /// Records a reviewer's confirm or reject on a proposed candidate.
    pub fn apply_decision(&mut self, candidate_id: &str, decision: Decision) -> Result<()> {
        self.require(&[Phase::TableMatchingDone, Phase::UnderReview], "deciding on a candidate")?;
        let candidate = self
            .candidates
            .iter_mut()
            .find(|c| c.id == candidate_id)
            .ok_or_else(|| Error::NotFound(format!("candidate {candidate_id} in run {}", self.run_id)))?;
        match decision {
            Decision::Confirm => candidate.confirm()?,
            Decision::Reject => candidate.reject()?,
        }
        let mut timestamp = Utc::now();
        if let Some(last) = self.decisions_log.last() {
            timestamp = timestamp.max(last.timestamp);
        }
        self.decisions_log.push(DecisionRecord {
            sequence: self.decisions_log.len() as u64 + 1,
            candidate_id: candidate_id.to_string(),
            decision,
            timestamp,
        });
        self.phase = Phase::UnderReview;
        Ok(())
    }

    /// Scores the run against `gold`, or the gold stored with the run. Without
    /// any gold the run still moves to `reported` and no metrics are produced.
    pub fn report(&mut self, gold: Option<&GoldAlignment>) -> Result<Option<RunReport>> {
        self.require(&[Phase::AttributeMatchingDone, Phase::Reported], "reporting")?;
        let gold = match gold {
            Some(g) => {
                g.validate(&self.source, &self.target)?;
                Some(g.clone())
            }
            None => self.gold.clone(),
        };
        let report = gold.map(|g| RunReport {
            table_level: evaluate(&self.accepted_table_pairs(), &g.table_pairs, self.target.tables.len()),
            attribute_level: evaluate(
                &self.attribute_pairs(),
                &g.attribute_pairs,
                self.target.attribute_count(),
            ),
        });
        self.report = report.clone();
        self.phase = Phase::Reported;
        Ok(report)
    }

    /// Table pairs of every candidate not rejected.
    pub fn accepted_table_pairs(&self) -> BTreeSet<(String, String)> {
        self.candidates
            .iter()
            .filter(|c| c.status != CandidateStatus::Rejected)
            .map(TableCandidate::pair)
            .collect()
    }

    pub fn attribute_pairs(&self) -> BTreeSet<(AttributeRef, AttributeRef)> {
        self.correspondences
            .iter()
            .map(|c| (c.source.clone(), c.target.clone()))
            .collect()
    }

    /// One JSON record per candidate, in candidate order.
    pub fn export_candidates_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Rec<'a> {
            run_id: &'a str,
            #[serde(flatten)]
            candidate: &'a TableCandidate,
        }
        let mut out = String::new();
        for c in &self.candidates {
            out.push_str(&serde_json::to_string(&Rec { run_id: &self.run_id, candidate: c }).expect("candidate serializes"));
            out.push('\n');
        }
        out
    }

    /// One JSON record per correspondence. The run id is left out so that the
    /// file depends only on inputs, configuration and decisions.
    pub fn export_correspondences_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.correspondences {
            out.push_str(&serde_json::to_string(c).expect("correspondence serializes"));
            out.push('\n');
        }
        out
    }
}

/// Executes pipeline steps with one embedding provider.
pub struct Pipeline<'p> {
    provider: &'p dyn EmbeddingProvider,
}

impl<'p> Pipeline<'p> {
    pub fn new(provider: &'p dyn EmbeddingProvider) -> Self {
        Pipeline { provider }
    }

    /// Runs the configured table-matching strategy. On error the run is left
    /// untouched in `created`, so the call can simply be retried.
    pub fn run_table_phase(&self, run: &mut RunState) -> Result<()> {
        run.require(&[Phase::Created], "table matching")?;
        let outcome = match_tables(&run.source, &run.target, self.provider, &run.config)?;
        run.candidates = outcome.candidates;
        run.diagnostics = outcome.diagnostics;
        run.source_columns = outcome.source_columns;
        run.target_columns = outcome.target_columns;
        run.phase = Phase::TableMatchingDone;
        Ok(())
    }

    /// Matches attributes of every candidate not rejected, then rejects the
    /// candidates that received no correspondence.
    pub fn run_attribute_phase(&self, run: &mut RunState) -> Result<()> {
        run.require(&[Phase::TableMatchingDone, Phase::UnderReview], "attribute matching")?;
        let digest = crate::representation::sampling_digest(&run.config.sampling);
        let stores = match (&run.source_columns, &run.target_columns) {
            (Some(s), Some(t)) if s.sampling_digest == digest && t.sampling_digest == digest => Some((s, t)),
            _ => None,
        };
        let correspondences = match_attributes(
            &run.source,
            &run.target,
            &run.candidates,
            self.provider,
            &run.config,
            stores,
        )?;
        run.candidates = reject_unsupported_table_matches(std::mem::take(&mut run.candidates), &correspondences);
        run.correspondences = correspondences;
        run.phase = Phase::AttributeMatchingDone;
        Ok(())
    }

    /// Moves the run one phase forward: table step, attribute step, report.
    pub fn advance(&self, run: &mut RunState) -> Result<Phase> {
        match run.phase {
            Phase::Created => self.run_table_phase(run)?,
            Phase::TableMatchingDone | Phase::UnderReview => self.run_attribute_phase(run)?,
            Phase::AttributeMatchingDone => {
                run.report(None)?;
            }
            Phase::Reported => {
                return Err(Error::Phase {
                    phase: run.phase.to_string(),
                    message: "the run is complete".into(),
                })
            }
        }
        Ok(run.phase)
    }

    /// Table step, attribute step and report without any review.
    pub fn run_to_end(&self, run: &mut RunState) -> Result<Option<RunReport>> {
        while run.phase < Phase::AttributeMatchingDone {
            self.advance(run)?;
        }
        run.report(None)
    }
}
