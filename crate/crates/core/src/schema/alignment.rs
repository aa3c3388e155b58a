use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{nfc, Schema};
use crate::error::{Error, Result};

/// Fully qualified attribute name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AttributeRef {
    pub table: String,
    pub attribute: String,
}

impl AttributeRef {
    pub fn new(table: impl Into<String>, attribute: impl Into<String>) -> Self {
        AttributeRef {
            table: table.into(),
            attribute: attribute.into(),
        }
    }
}

impl std::fmt::Display for AttributeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.table, self.attribute)
    }
}

/// Ground-truth correspondences between a source and a target schema.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAlignment {
    pub table_pairs: BTreeSet<(String, String)>,
    pub attribute_pairs: BTreeSet<(AttributeRef, AttributeRef)>,
}

#[derive(Deserialize)]
struct AlignmentFile {
    #[serde(default)]
    table_pairs: Vec<(String, String)>,
    #[serde(default)]
    attribute_pairs: Vec<((String, String), (String, String))>,
}

impl GoldAlignment {
    pub fn parse(content: &str, origin: &str) -> Result<Self> {
        let doc: AlignmentFile = serde_json::from_str(content).map_err(|e| Error::Parse {
            location: format!("{origin}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Ok(GoldAlignment {
            table_pairs: doc
                .table_pairs
                .into_iter()
                .map(|(s, t)| (nfc(&s), nfc(&t)))
                .collect(),
            attribute_pairs: doc
                .attribute_pairs
                .into_iter()
                .map(|((st, sa), (tt, ta))| {
                    (
                        AttributeRef::new(nfc(&st), nfc(&sa)),
                        AttributeRef::new(nfc(&tt), nfc(&ta)),
                    )
                })
                .collect(),
        })
    }

    /// Checks every referenced element against the matched schemata.
    pub fn validate(&self, source: &Schema, target: &Schema) -> Result<()> {
        for (s, t) in &self.table_pairs {
            check_table(source, s)?;
            check_table(target, t)?;
        }
        for (s, t) in &self.attribute_pairs {
            check_attribute(source, s)?;
            check_attribute(target, t)?;
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        let doc = serde_json::json!({
            "table_pairs": self.table_pairs.iter().map(|(s, t)| [s, t]).collect::<Vec<_>>(),
            "attribute_pairs": self.attribute_pairs.iter()
                .map(|(s, t)| [[&s.table, &s.attribute], [&t.table, &t.attribute]])
                .collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&doc).expect("alignment serializes")
    }
}

fn check_table(schema: &Schema, table: &str) -> Result<()> {
    schema.table(table).map(|_| ()).ok_or_else(|| {
        Error::validation(format!(
            "alignment refers to table `{table}` missing from schema `{}`",
            schema.name
        ))
    })
}

fn check_attribute(schema: &Schema, attr: &AttributeRef) -> Result<()> {
    let table = schema.table(&attr.table).ok_or_else(|| {
        Error::validation(format!(
            "alignment refers to table `{}` missing from schema `{}`",
            attr.table, schema.name
        ))
    })?;
    table.attribute(&attr.attribute).map(|_| ()).ok_or_else(|| {
        Error::validation(format!(
            "alignment refers to attribute `{attr}` missing from schema `{}`",
            schema.name
        ))
    })
}

pub fn load_alignment(path: impl AsRef<Path>) -> Result<GoldAlignment> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GoldAlignment::parse(&content, &path.display().to_string())
}
