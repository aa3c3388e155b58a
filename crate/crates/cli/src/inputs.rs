//! Loading schemata, instance files and alignments named on the command
//! line or in service requests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use schemamatch::schema::{load_alignment, load_instances, load_schema, GoldAlignment, Schema};
use schemamatch::Result;
use serde::Deserialize;

/// Instance files given either as a directory or table by table.
///
/// In a directory, table `T` of schema `S` is read from `T.csv` or
/// `S.T.csv`; tables without a file simply have no instances.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InstancesSpec {
    Dir(PathBuf),
    Files(BTreeMap<String, PathBuf>),
}

fn files_in_dir(schema: &Schema, dir: &Path) -> BTreeMap<String, PathBuf> {
    let mut files = BTreeMap::new();
    for t in &schema.tables {
        for candidate in [dir.join(format!("{}.csv", t.name)), dir.join(format!("{}.{}.csv", schema.name, t.name))] {
            if candidate.is_file() {
                files.insert(t.name.clone(), candidate);
                break;
            }
        }
    }
    files
}

pub fn load_side(schema_path: &Path, instances: Option<&InstancesSpec>) -> Result<Schema> {
    let schema = load_schema(schema_path)?;
    let files = match instances {
        None => return Ok(schema),
        Some(InstancesSpec::Dir(dir)) => files_in_dir(&schema, dir),
        Some(InstancesSpec::Files(f)) => f.clone(),
    };
    load_instances(schema, &files)
}

pub struct Inputs {
    pub source: Schema,
    pub target: Schema,
    pub gold: Option<GoldAlignment>,
}

pub fn load_inputs(
    source: &Path,
    source_instances: Option<&InstancesSpec>,
    target: &Path,
    target_instances: Option<&InstancesSpec>,
    gold: Option<&Path>,
) -> Result<Inputs> {
    let source = load_side(source, source_instances)?;
    let target = load_side(target, target_instances)?;
    let gold = gold.map(load_alignment).transpose()?;
    if let Some(g) = &gold {
        g.validate(&source, &target)?;
    }
    Ok(Inputs { source, target, gold })
}
