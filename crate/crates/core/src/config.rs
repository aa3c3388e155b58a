//! Matching parameters shared by both pipeline steps.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::embedding::{LabelAggregation, TextPrepConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sampling::SamplingConfig;

/// Per-target cutoff on the number of schema-based table candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TopN(pub Option<usize>);

impl TopN {
    pub const UNLIMITED: TopN = TopN(None);

    pub fn limit(n: usize) -> Self {
        TopN(Some(n))
    }

    pub fn allows(&self, count: usize) -> bool {
        self.0.is_none_or(|n| count < n)
    }
}

impl std::str::FromStr for TopN {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unlimited" | "all" | "inf" => Ok(TopN::UNLIMITED),
            other => other
                .parse::<usize>()
                .map(TopN::limit)
                .map_err(|_| Error::validation(format!("invalid top-n value `{s}`"))),
        }
    }
}

impl std::fmt::Display for TopN {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("unlimited"),
        }
    }
}

impl Serialize for TopN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(n) => s.serialize_u64(n as u64),
            None => s.serialize_str("unlimited"),
        }
    }
}

impl<'de> Deserialize<'de> for TopN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(usize),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(n) => Ok(TopN::limit(n)),
            Repr::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Every cell at or above the attribute threshold.
    #[default]
    Threshold,
    /// The k best cells per target attribute.
    TopK(usize),
    /// Greedy injective assignment over cells at or above the threshold.
    OneToOne,
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('-', "_");
        if let Some(k) = lower
            .strip_prefix("top_k:")
            .or_else(|| lower.strip_prefix("top_k="))
        {
            return k
                .parse()
                .map(SelectionMode::TopK)
                .map_err(|_| Error::validation(format!("invalid k in `{s}`")));
        }
        match lower.as_str() {
            "threshold" => Ok(SelectionMode::Threshold),
            "one_to_one" | "1:1" => Ok(SelectionMode::OneToOne),
            "top_k" => Ok(SelectionMode::TopK(1)),
            _ => Err(Error::validation(format!("unknown selection mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStrategy {
    Schema,
    Instance,
    #[default]
    Combined,
}

impl std::str::FromStr for TableStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "schema" | "schema_based" => Ok(TableStrategy::Schema),
            "instance" | "instance_based" => Ok(TableStrategy::Instance),
            "combined" => Ok(TableStrategy::Combined),
            _ => Err(Error::validation(format!("unknown table strategy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatcherKind {
    NameBased,
    CommentBased,
    InstanceBased,
}

impl std::str::FromStr for MatcherKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "nb" | "name" | "name_based" => Ok(MatcherKind::NameBased),
            "cb" | "comment" | "comment_based" => Ok(MatcherKind::CommentBased),
            "ib" | "instance" | "instance_based" => Ok(MatcherKind::InstanceBased),
            _ => Err(Error::validation(format!("unknown matcher `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    /// Schema-similarity threshold of the table step.
    pub t: f64,
    pub n: TopN,
    /// Attribute-similarity threshold of instance-based table matching.
    pub t_a: f64,
    /// Fraction of attributes that must match for a table candidate.
    pub col_ratio: f64,
    /// Minimum attribute-pair score kept by averaged table scoring.
    pub pair_cutoff: f64,
    pub sampling: SamplingConfig,
    /// Threshold of the attribute step.
    pub attr_threshold: f64,
    pub selection_mode: SelectionMode,
    pub strategy: TableStrategy,
    pub matchers: Vec<MatcherKind>,
    pub text_prep: TextPrepConfig,
    pub label_aggregation: LabelAggregation,
    pub execution: Execution,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            t: 0.5,
            n: TopN::limit(8),
            t_a: 0.95,
            col_ratio: 0.5,
            pair_cutoff: 0.5,
            sampling: SamplingConfig::default(),
            attr_threshold: 0.8,
            selection_mode: SelectionMode::Threshold,
            strategy: TableStrategy::Combined,
            matchers: vec![MatcherKind::NameBased],
            text_prep: TextPrepConfig::default(),
            label_aggregation: LabelAggregation::Whole,
            execution: Execution::Parallel,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("t", self.t),
            ("t_a", self.t_a),
            ("col_ratio", self.col_ratio),
            ("pair_cutoff", self.pair_cutoff),
            ("attr_threshold", self.attr_threshold),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::validation(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        if self.n == TopN::limit(0) {
            return Err(Error::validation("n must be positive or unlimited"));
        }
        if self.selection_mode == SelectionMode::TopK(0) {
            return Err(Error::validation("top_k needs k >= 1"));
        }
        if self.matchers.is_empty() {
            return Err(Error::validation("at least one attribute matcher is required"));
        }
        self.sampling.validate()
    }

    /// Stable digest of every setting that can change results.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.execution = Execution::default();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}
