//! Schemata, tables, attributes and gold alignments.
//!
//! Everything entering the engine from disk is normalized to Unicode NFC at
//! load time so that byte-level comparisons (tie-breaks, dictionary lookups,
//! frequency counting) are stable across inputs from different sources.

mod alignment;
mod io;
mod kind;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub use alignment::{load_alignment, AttributeRef, GoldAlignment};
pub use io::{load_instances, load_schema, parse_schema, save_schema, schema_to_file_string};
pub use kind::{classify_data_kind, is_decimal_number, DataKind};

pub(crate) fn nfc(s: &str) -> String {
    s.nfc().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub comment: Option<String>,
    pub data_kind: DataKind,
    /// Cell values in row order. Blank cells are kept as empty strings.
    pub instances: Vec<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            comment: None,
            data_kind: DataKind::Empty,
            instances: Vec::new(),
        }
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    /// Replaces the instance list and reclassifies the attribute.
    pub fn with_instances<I, S>(mut self, instances: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.set_instances(instances.into_iter().map(Into::into).collect());
        self
    }

    pub fn set_instances(&mut self, instances: Vec<String>) {
        self.data_kind = classify_data_kind(&instances);
        self.instances = instances;
    }

    /// Non-empty instances, i.e. the values that can carry embeddable content.
    pub fn usable_instances(&self) -> impl Iterator<Item = &str> {
        self.instances
            .iter()
            .map(String::as_str)
            .filter(|v| !v.trim().is_empty())
    }

    /// Textual and mixed attributes take part in instance-based matching.
    pub fn participates_in_instance_matching(&self) -> bool {
        matches!(self.data_kind, DataKind::Textual | DataKind::Mixed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub comment: Option<String>,
    pub attributes: Vec<Attribute>,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Table {
            name: name.into(),
            comment: None,
            attributes: Vec::new(),
        }
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    pub fn with_attribute(mut self, attribute: Attribute) -> Self {
        self.attributes.push(attribute);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_mut(&mut self, name: &str) -> Option<&mut Attribute> {
        self.attributes.iter_mut().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub name: String,
    pub tables: Vec<Table>,
}

impl Schema {
    /// Builds a schema and checks its invariants.
    pub fn new(name: impl Into<String>, tables: Vec<Table>) -> Result<Self> {
        let schema = Schema {
            name: name.into(),
            tables,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        self.tables.iter_mut().find(|t| t.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("schema name must not be empty"));
        }
        let mut tables = HashSet::new();
        for table in &self.tables {
            if table.name.trim().is_empty() {
                return Err(Error::validation(format!(
                    "schema `{}` contains a table with an empty name",
                    self.name
                )));
            }
            if !tables.insert(table.name.as_str()) {
                return Err(Error::validation(format!(
                    "duplicate table name `{}` in schema `{}`",
                    table.name, self.name
                )));
            }
            let mut attrs = HashSet::new();
            for attr in &table.attributes {
                if attr.name.trim().is_empty() {
                    return Err(Error::validation(format!(
                        "table `{}` contains an attribute with an empty name",
                        table.name
                    )));
                }
                if !attrs.insert(attr.name.as_str()) {
                    return Err(Error::validation(format!(
                        "duplicate attribute name `{}` in table `{}`",
                        attr.name, table.name
                    )));
                }
                if attr.data_kind != classify_data_kind(&attr.instances) {
                    return Err(Error::validation(format!(
                        "attribute `{}.{}` has a data kind inconsistent with its instances",
                        table.name, attr.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of attributes over all tables.
    pub fn attribute_count(&self) -> usize {
        self.tables.iter().map(|t| t.attributes.len()).sum()
    }
}
