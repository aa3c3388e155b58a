//! Benchmark suites: many matching problems run with one configuration and
//! scored at table and attribute level.
//!
//! Suite manifest (JSON):
//! `{"problems": [{"id": .., "source": "s.json", "target": "t.json",
//!   "source_instances": {"table": "file.csv"}, "target_instances": {..},
//!   "alignment": "gold.json"}]}`. Relative paths resolve against the
//! manifest's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{macro_average, EvalReport};
use crate::config::MatchConfig;
use crate::embedding::EmbeddingProvider;
use crate::error::{Error, Result};
use crate::exec;
use crate::orchestrator::{Pipeline, RunState};
use crate::schema::{load_alignment, load_instances, load_schema, GoldAlignment, Schema};

#[derive(Debug, Clone)]
pub struct Problem {
    pub id: String,
    pub source: Schema,
    pub target: Schema,
    pub gold: GoldAlignment,
}

#[derive(Deserialize)]
struct SuiteFile {
    problems: Vec<ProblemEntry>,
}

#[derive(Deserialize)]
struct ProblemEntry {
    id: String,
    source: PathBuf,
    target: PathBuf,
    #[serde(default)]
    source_instances: BTreeMap<String, PathBuf>,
    #[serde(default)]
    target_instances: BTreeMap<String, PathBuf>,
    alignment: PathBuf,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_problem(base: &Path, entry: &ProblemEntry) -> Result<Problem> {
    let res = |m: &BTreeMap<String, PathBuf>| -> BTreeMap<String, PathBuf> {
        m.iter().map(|(k, v)| (k.clone(), resolve(base, v))).collect()
    };
    let source = load_instances(load_schema(resolve(base, &entry.source))?, &res(&entry.source_instances))?;
    let target = load_instances(load_schema(resolve(base, &entry.target))?, &res(&entry.target_instances))?;
    let gold = load_alignment(resolve(base, &entry.alignment))?;
    gold.validate(&source, &target)?;
    Ok(Problem {
        id: entry.id.clone(),
        source,
        target,
        gold,
    })
}

/// Loads every problem of a suite; the first failure aborts with its id.
pub fn load_suite(manifest: impl AsRef<Path>) -> Result<Vec<Problem>> {
    let manifest = manifest.as_ref();
    let content = std::fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let suite: SuiteFile = serde_json::from_str(&content).map_err(|e| Error::Parse {
        location: format!("{}:{}:{}", manifest.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    suite
        .problems
        .iter()
        .map(|entry| {
            load_problem(base, entry).map_err(|e| {
                Error::validation(format!("problem `{}` failed to load: {e}", entry.id))
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock durations in the results. Off for byte-stable output.
    pub record_timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemResult {
    pub problem_id: String,
    pub config_digest: String,
    pub table_level: EvalReport,
    pub attribute_level: EvalReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResults {
    pub config_digest: String,
    pub problems: Vec<ProblemResult>,
    pub table_level: EvalReport,
    pub attribute_level: EvalReport,
}

impl BenchmarkResults {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }
}

/// Runs the full pipeline (no review) on every problem and averages the
/// per-problem reports.
pub fn benchmark_run(
    problems: &[Problem],
    provider: &dyn EmbeddingProvider,
    cfg: &MatchConfig,
    options: RunOptions,
) -> Result<BenchmarkResults> {
    if problems.is_empty() {
        return Err(Error::contract("benchmark suite contains no problems"));
    }
    cfg.validate()?;
    let digest = cfg.digest();
    let pipeline = Pipeline::new(provider);
    let mut results = exec::try_map(cfg.execution, problems, |problem| {
        let started = Instant::now();
        let mut run = RunState::new(
            format!("bench-{}", problem.id),
            problem.source.clone(),
            problem.target.clone(),
            Some(problem.gold.clone()),
            cfg.clone(),
        )?;
        pipeline.run_table_phase(&mut run)?;
        pipeline.run_attribute_phase(&mut run)?;
        let report = run.report(None)?.expect("gold supplied");
        Ok(ProblemResult {
            problem_id: problem.id.clone(),
            config_digest: digest.clone(),
            table_level: report.table_level,
            attribute_level: report.attribute_level,
            duration_ms: options
                .record_timings
                .then(|| started.elapsed().as_secs_f64() * 1000.0),
        })
    })
    .map_err(|e| Error::validation(format!("benchmark aborted: {e}")))?;
    results.sort_by(|a, b| a.problem_id.cmp(&b.problem_id));
    let table: Vec<EvalReport> = results.iter().map(|r| r.table_level.clone()).collect();
    let attr: Vec<EvalReport> = results.iter().map(|r| r.attribute_level.clone()).collect();
    Ok(BenchmarkResults {
        config_digest: digest,
        table_level: macro_average(&table)?,
        attribute_level: macro_average(&attr)?,
        problems: results,
    })
}
