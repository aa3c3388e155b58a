//! Implementations of the command-line verbs.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use schemamatch::evaluation::{benchmark_run, load_suite, RunOptions};
use schemamatch::orchestrator::{Phase, Pipeline, RunReport, RunState, RunStore};
use schemamatch::representation::ColumnStore;

use crate::args::{Format, InputArgs, ProviderArgs, RunArgs, SettingsArgs};
use crate::inputs::{load_inputs, load_side, InstancesSpec};
use crate::review::{describe, review_loop};
use crate::service::{router, AppState};

fn write_file(path: &Path, contents: &str) -> schemamatch::Result<()> {
    fs::write(path, contents).map_err(|e| schemamatch::Error::io(path, e))
}

fn print_report(out: &mut dyn Write, report: &RunReport) -> std::io::Result<()> {
    for (level, r) in [("tables", &report.table_level), ("attributes", &report.attribute_level)] {
        writeln!(
            out,
            "{level:<10}  P {:.3}  R {:.3}  F1 {:.3}  ({} proposed, {} gold, {} correct)",
            r.precision, r.recall, r.f1, r.proposed_count, r.gold_count, r.true_positive_count
        )?;
    }
    Ok(())
}

fn run_id(run: &RunArgs) -> anyhow::Result<&str> {
    run.run_id
        .as_deref()
        .ok_or_else(|| anyhow!(schemamatch::Error::validation("--run-id is required")))
}

pub fn match_tables(
    input: &InputArgs,
    settings: &SettingsArgs,
    run: &RunArgs,
    format: Format,
    out: &mut dyn Write,
) -> anyhow::Result<RunState> {
    let s = settings.resolve()?;
    let provider = s.provider.build()?;
    let inputs = load_inputs(
        &input.source,
        input.source_spec().as_ref(),
        &input.target,
        input.target_spec().as_ref(),
        input.gold.as_deref(),
    )?;
    let id = run
        .run_id
        .clone()
        .unwrap_or_else(|| uuid::Uuid::new_v4().simple().to_string());
    let store = RunStore::open(&run.runs)?;
    let mut state = RunState::new(id, inputs.source, inputs.target, inputs.gold, s.matching)?;
    store.create(&state)?;
    Pipeline::new(provider.as_ref()).run_table_phase(&mut state)?;
    store.persist(&state)?;
    match format {
        Format::Jsonl => out.write_all(state.export_candidates_jsonl().as_bytes())?,
        Format::Table => {
            writeln!(out, "run {}  ({} candidates)", state.run_id, state.candidates.len())?;
            for c in &state.candidates {
                writeln!(out, "  {}", describe(c))?;
            }
        }
    }
    Ok(state)
}

pub fn review(run: &RunArgs, input: impl BufRead, out: &mut dyn Write) -> anyhow::Result<usize> {
    let id = run_id(run)?;
    let store = RunStore::open(&run.runs)?;
    let lock = store.lock(id);
    let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
    let mut state = store.load(id)?;
    if !matches!(state.phase, Phase::TableMatchingDone | Phase::UnderReview) {
        return Err(schemamatch::Error::Phase {
            phase: state.phase.to_string(),
            message: "review is only possible after table matching".into(),
        }
        .into());
    }
    let made = review_loop(&mut state, input, &mut *out, |r| store.persist(r))?;
    writeln!(out, "{made} decision(s) recorded")?;
    Ok(made)
}

pub fn match_attributes(
    run: &RunArgs,
    provider: &ProviderArgs,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> anyhow::Result<RunState> {
    let id = run_id(run)?;
    let file = provider.file()?;
    let provider = provider.resolve(&file)?.build()?;
    let store = RunStore::open(&run.runs)?;
    let lock = store.lock(id);
    let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
    let mut state = store.load(id)?;
    Pipeline::new(provider.as_ref()).run_attribute_phase(&mut state)?;
    let report = state.report(None)?;
    store.persist(&state)?;
    let jsonl = state.export_correspondences_jsonl();
    match output {
        Some(p) => write_file(p, &jsonl)?,
        None => out.write_all(jsonl.as_bytes())?,
    }
    for d in &state.diagnostics {
        eprintln!("note: {d}");
    }
    if let Some(r) = &report {
        let mut err = std::io::stderr();
        print_report(&mut err, r)?;
    }
    Ok(state)
}

pub fn e2e(
    input: &InputArgs,
    settings: &SettingsArgs,
    output_dir: &Path,
    run_id: &str,
    out: &mut dyn Write,
) -> anyhow::Result<RunState> {
    let s = settings.resolve()?;
    let provider = s.provider.build()?;
    let inputs = load_inputs(
        &input.source,
        input.source_spec().as_ref(),
        &input.target,
        input.target_spec().as_ref(),
        input.gold.as_deref(),
    )?;
    let mut state = RunState::new(run_id, inputs.source, inputs.target, inputs.gold, s.matching)?;
    let report = Pipeline::new(provider.as_ref()).run_to_end(&mut state)?;
    fs::create_dir_all(output_dir).map_err(|e| schemamatch::Error::io(output_dir, e))?;
    write_file(&output_dir.join("candidates.jsonl"), &state.export_candidates_jsonl())?;
    write_file(&output_dir.join("correspondences.jsonl"), &state.export_correspondences_jsonl())?;
    writeln!(
        out,
        "{} table candidates, {} correspondences",
        state.candidates.len(),
        state.correspondences.len()
    )?;
    if let Some(r) = &report {
        let json = serde_json::to_string_pretty(r)? + "\n";
        write_file(&output_dir.join("report.json"), &json)?;
        print_report(out, r)?;
    }
    Ok(state)
}

pub fn eval(
    suite: &Path,
    settings: &SettingsArgs,
    output: Option<&Path>,
    timings: bool,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let s = settings.resolve()?;
    let provider = s.provider.build()?;
    let problems = load_suite(suite)?;
    let results = benchmark_run(
        &problems,
        provider.as_ref(),
        &s.matching,
        RunOptions { record_timings: timings },
    )?;
    match output {
        Some(p) => {
            results.write(p)?;
            for r in &results.problems {
                writeln!(
                    out,
                    "{:<20}  tables F1 {:.3}  attributes F1 {:.3}",
                    r.problem_id, r.table_level.f1, r.attribute_level.f1
                )?;
            }
            print_report(
                out,
                &RunReport {
                    table_level: results.table_level.clone(),
                    attribute_level: results.attribute_level.clone(),
                },
            )?;
        }
        None => out.write_all(results.to_json_string().as_bytes())?,
    }
    Ok(())
}

pub fn embed_cache(
    schema: &Path,
    instances: &Path,
    settings: &SettingsArgs,
    output: &Path,
) -> anyhow::Result<usize> {
    let s = settings.resolve()?;
    let provider = s.provider.build()?;
    let schema = load_side(schema, Some(&InstancesSpec::Dir(instances.to_path_buf())))?;
    let store = ColumnStore::build(provider.as_ref(), &schema, &s.matching.sampling, s.matching.execution)?;
    let mut buf = Vec::new();
    store.write_jsonl(&schema.name, &mut buf)?;
    fs::write(output, buf).with_context(|| format!("writing {}", output.display()))?;
    Ok(store.len())
}

pub async fn serve(runs: &Path, addr: std::net::SocketAddr, settings: &SettingsArgs) -> anyhow::Result<()> {
    let s = settings.resolve()?;
    let state = Arc::new(AppState {
        store: RunStore::open(runs)?,
        provider: s.provider.build()?,
        defaults: s.matching,
    });
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
