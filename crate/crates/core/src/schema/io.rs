//! Schema and instance files.
//!
//! Schema file (JSON):
//! `{"schema": {"name": .., "tables": [{"name": .., "comment": .., "attributes": [{"name": .., "comment": ..}]}]}}`
//!
//! Instance files are RFC-4180 CSV with a header row naming attributes.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{nfc, Attribute, Schema, Table};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    schema: SchemaDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    name: String,
    #[serde(default)]
    tables: Vec<TableDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
    #[serde(default)]
    attributes: Vec<AttributeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
}

/// Parses schema file content. `origin` names the source in error messages.
pub fn parse_schema(content: &str, origin: &str) -> Result<Schema> {
    let doc: SchemaFile = serde_json::from_str(content).map_err(|e| Error::Parse {
        location: format!("{origin}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let tables = doc
        .schema
        .tables
        .into_iter()
        .map(|t| Table {
            name: nfc(&t.name),
            comment: t.comment.as_deref().map(nfc),
            attributes: t
                .attributes
                .into_iter()
                .map(|a| Attribute {
                    name: nfc(&a.name),
                    comment: a.comment.as_deref().map(nfc),
                    ..Attribute::new("")
                })
                .collect(),
        })
        .collect();
    Schema::new(nfc(&doc.schema.name), tables)
}

pub fn load_schema(path: impl AsRef<Path>) -> Result<Schema> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schema(&content, &path.display().to_string())
}

/// Serializes the structural part of a schema (no instances) in the schema
/// file format.
pub fn schema_to_file_string(schema: &Schema) -> String {
    let doc = SchemaFile {
        schema: SchemaDoc {
            name: schema.name.clone(),
            tables: schema
                .tables
                .iter()
                .map(|t| TableDoc {
                    name: t.name.clone(),
                    comment: t.comment.clone(),
                    attributes: t
                        .attributes
                        .iter()
                        .map(|a| AttributeDoc {
                            name: a.name.clone(),
                            comment: a.comment.clone(),
                        })
                        .collect(),
                })
                .collect(),
        },
    };
    serde_json::to_string_pretty(&doc).expect("schema document serializes")
}

pub fn save_schema(schema: &Schema, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, schema_to_file_string(schema)).map_err(|e| Error::io(path, e))
}

/// Fills instance lists from one CSV file per table.
///
/// Attributes not named in a header keep their current instances. Blank
/// cells are recorded as empty strings.
pub fn load_instances(
    mut schema: Schema,
    mapping: &BTreeMap<String, PathBuf>,
) -> Result<Schema> {
    for (table_name, path) in mapping {
        let table_name = nfc(table_name);
        let table = schema.table_mut(&table_name).ok_or_else(|| {
            Error::validation(format!(
                "instance file {} refers to unknown table `{table_name}`",
                path.display()
            ))
        })?;
        let columns = read_csv_columns(path)?;
        let mut seen = HashSet::new();
        for (header, _) in &columns {
            if !seen.insert(header.as_str()) {
                return Err(Error::validation(format!(
                    "{}: column `{header}` appears twice",
                    path.display()
                )));
            }
            if table.attribute(header).is_none() {
                return Err(Error::validation(format!(
                    "{}: column `{header}` is not an attribute of table `{}`",
                    path.display(),
                    table.name
                )));
            }
        }
        for (header, values) in columns {
            table
                .attribute_mut(&header)
                .expect("checked above")
                .set_instances(values);
        }
    }
    Ok(schema)
}

fn read_csv_columns(path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(&display, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&display, e))?
        .iter()
        .map(|h| nfc(h.trim_start_matches('\u{feff}').trim()))
        .collect();
    let mut columns: Vec<(String, Vec<String>)> =
        headers.into_iter().map(|h| (h, Vec::new())).collect();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&display, e))?;
        for (column, cell) in columns.iter_mut().zip(record.iter()) {
            column.1.push(nfc(cell));
        }
    }
    Ok(columns)
}

fn csv_error(origin: &str, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Parse {
            location: origin.to_string(),
            message: e.to_string(),
        },
        _ => {
            let location = match e.position() {
                Some(pos) => format!("{origin}: row {}", pos.line()),
                None => origin.to_string(),
            };
            let message = match e.kind() {
                csv::ErrorKind::UnequalLengths {
                    expected_len, len, ..
                } => format!("expected {expected_len} fields, found {len}"),
                _ => e.to_string(),
            };
            Error::Parse { location, message }
        }
    }
}
