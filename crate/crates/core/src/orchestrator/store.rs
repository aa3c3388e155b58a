//! Plain-file run persistence: one directory per run holding `state.json`
//! and, when the table step computed them, `columns.jsonl`.

use std::collections::HashMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use super::{validate_run_id, RunState};
use crate::error::{Error, Result};
use crate::representation::ColumnStore;

const STATE_FILE: &str = "state.json";
const COLUMNS_FILE: &str = "columns.jsonl";
const SOURCE_TAG: &str = "source";
const TARGET_TAG: &str = "target";

/// Serializes mutations of one run; readers never take it.
pub type RunLock = Arc<Mutex<()>>;

#[derive(Debug)]
pub struct RunStore {
    root: PathBuf,
    locks: Mutex<HashMap<String, RunLock>>,
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
    Ok(())
}

impl RunStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(RunStore {
            root,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn run_dir(&self, run_id: &str) -> Result<PathBuf> {
        validate_run_id(run_id)?;
        Ok(self.root.join(run_id))
    }

    pub fn exists(&self, run_id: &str) -> bool {
        self.run_dir(run_id)
            .map(|d| d.join(STATE_FILE).is_file())
            .unwrap_or(false)
    }

    /// The writer lock of `run_id`, created on first use.
    pub fn lock(&self, run_id: &str) -> RunLock {
        let mut locks = self.locks.lock().unwrap_or_else(|p| p.into_inner());
        locks.entry(run_id.to_string()).or_default().clone()
    }

    /// Persists a run that must not exist yet.
    pub fn create(&self, run: &RunState) -> Result<()> {
        if self.exists(&run.run_id) {
            return Err(Error::Conflict(format!("run {} already exists", run.run_id)));
        }
        self.persist(run)
    }

    pub fn persist(&self, run: &RunState) -> Result<()> {
        let dir = self.run_dir(&run.run_id)?;
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let state = serde_json::to_vec_pretty(run).expect("run state serializes");
        let columns_path = dir.join(COLUMNS_FILE);
        match (&run.source_columns, &run.target_columns) {
            (Some(s), Some(t)) => {
                let mut buf = Vec::new();
                s.write_jsonl(SOURCE_TAG, &mut buf).expect("write to memory");
                t.write_jsonl(TARGET_TAG, &mut buf).expect("write to memory");
                write_atomic(&dir, COLUMNS_FILE, &buf)?;
            }
            _ if columns_path.exists() => {
                fs::remove_file(&columns_path).map_err(|e| Error::io(&columns_path, e))?;
            }
            _ => {}
        }
        write_atomic(&dir, STATE_FILE, &state)
    }

    pub fn load(&self, run_id: &str) -> Result<RunState> {
        let dir = self.run_dir(run_id)?;
        let state_path = dir.join(STATE_FILE);
        if !state_path.is_file() {
            return Err(Error::NotFound(format!("run {run_id}")));
        }
        let content = fs::read_to_string(&state_path).map_err(|e| Error::io(&state_path, e))?;
        let mut run: RunState = serde_json::from_str(&content).map_err(|e| Error::CorruptState {
            path: state_path.clone(),
            message: e.to_string(),
        })?;
        if run.run_id != run_id {
            return Err(Error::CorruptState {
                path: state_path,
                message: format!("file belongs to run {}", run.run_id),
            });
        }
        let columns_path = dir.join(COLUMNS_FILE);
        if columns_path.is_file() {
            let read = |tag: &str| -> Result<ColumnStore> {
                let f = fs::File::open(&columns_path).map_err(|e| Error::io(&columns_path, e))?;
                ColumnStore::read_jsonl(BufReader::new(f), tag, &columns_path.display().to_string())
                    .map_err(|e| Error::CorruptState {
                        path: columns_path.clone(),
                        message: e.to_string(),
                    })
            };
            run.source_columns = Some(read(SOURCE_TAG)?);
            run.target_columns = Some(read(TARGET_TAG)?);
        }
        Ok(run)
    }

    /// Ids of all persisted runs, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.root).map_err(|e| Error::io(&self.root, e))? {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            if let Some(name) = entry.file_name().to_str() {
                if self.exists(name) {
                    ids.push(name.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}
