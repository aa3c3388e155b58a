//! HTTP API over persisted runs, used by the review client.
//!
//! Mutations of one run are serialized through the run store's per-run
//! lock; reads go straight to the files, which are replaced atomically.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use schemamatch::attribute_matcher::AttributeCorrespondence;
use schemamatch::config::MatchConfig;
use schemamatch::embedding::EmbeddingProvider;
use schemamatch::orchestrator::{Decision, DecisionRecord, Phase, Pipeline, RunReport, RunState, RunStore};
use schemamatch::table_matcher::TableCandidate;
use schemamatch::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::inputs::{load_inputs, InstancesSpec};

pub struct AppState {
    pub store: RunStore,
    pub provider: Arc<dyn EmbeddingProvider>,
    pub defaults: MatchConfig,
}

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError(Error::Validation(format!("bad request body: {}", r.body_text())))
    }
}

pub fn status_for(e: &Error) -> StatusCode {
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Contract(_) => StatusCode::BAD_REQUEST,
        Error::NotFound(_) => StatusCode::NOT_FOUND,
        Error::Conflict(_) | Error::Phase { .. } => StatusCode::CONFLICT,
        Error::Transport(_) => StatusCode::BAD_GATEWAY,
        Error::CorruptState { .. } | Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({"error": {"code": self.0.code(), "message": self.0.to_string()}});
        (status_for(&self.0), Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, Error> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(Error::Contract(format!("worker failed: {e}"))))?
        .map_err(ApiError)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRun {
    #[serde(default)]
    pub run_id: Option<String>,
    pub source: PathBuf,
    pub target: PathBuf,
    #[serde(default)]
    pub source_instances: Option<InstancesSpec>,
    #[serde(default)]
    pub target_instances: Option<InstancesSpec>,
    #[serde(default)]
    pub alignment: Option<PathBuf>,
    /// Partial configuration laid over the server defaults.
    #[serde(default)]
    pub config: Option<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunView {
    pub run_id: String,
    pub phase: Phase,
    pub source: String,
    pub target: String,
    pub config: MatchConfig,
    pub candidate_count: usize,
    pub correspondence_count: usize,
    pub decisions_log: Vec<DecisionRecord>,
    pub diagnostics: Vec<String>,
    pub report: Option<RunReport>,
}

impl From<&RunState> for RunView {
    fn from(r: &RunState) -> Self {
        RunView {
            run_id: r.run_id.clone(),
            phase: r.phase,
            source: r.source.name.clone(),
            target: r.target.name.clone(),
            config: r.config.clone(),
            candidate_count: r.candidates.len(),
            correspondence_count: r.correspondences.len(),
            decisions_log: r.decisions_log.clone(),
            diagnostics: r.diagnostics.clone(),
            report: r.report.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CandidateList {
    pub run_id: String,
    pub phase: Phase,
    pub candidates: Vec<TableCandidate>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecisionBody {
    pub decision: Decision,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecisionResult {
    pub run_id: String,
    pub phase: Phase,
    pub candidate: TableCandidate,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CorrespondenceList {
    pub run_id: String,
    pub correspondences: Vec<AttributeCorrespondence>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportView {
    pub run_id: String,
    pub report: Option<RunReport>,
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn layered_config(defaults: &MatchConfig, overrides: Option<Value>) -> Result<MatchConfig, Error> {
    let Some(over) = overrides else {
        return Ok(defaults.clone());
    };
    let mut base = serde_json::to_value(defaults).expect("config serializes");
    merge(&mut base, over);
    let cfg: MatchConfig =
        serde_json::from_value(base).map_err(|e| Error::Validation(format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn at_least(run: &RunState, phase: Phase, what: &str) -> Result<(), Error> {
    if run.phase < phase {
        return Err(Error::Phase {
            phase: run.phase.to_string(),
            message: format!("{what} are not available yet"),
        });
    }
    Ok(())
}

/// Loads, mutates and persists one run while holding its writer lock.
fn mutate<T>(state: &AppState, id: &str, f: impl FnOnce(&mut RunState) -> Result<T, Error>) -> Result<(RunState, T), Error> {
    let lock = state.store.lock(id);
    let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
    let mut run = state.store.load(id)?;
    let out = f(&mut run)?;
    state.store.persist(&run)?;
    Ok((run, out))
}

async fn create_run(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateRun>, JsonRejection>,
) -> Result<(StatusCode, Json<RunView>), ApiError> {
    let Json(req) = body?;
    let view = blocking(move || {
        let cfg = layered_config(&state.defaults, req.config)?;
        let inputs = load_inputs(
            &req.source,
            req.source_instances.as_ref(),
            &req.target,
            req.target_instances.as_ref(),
            req.alignment.as_deref(),
        )?;
        let id = req.run_id.unwrap_or_else(|| uuid::Uuid::new_v4().simple().to_string());
        let run = RunState::new(id.clone(), inputs.source, inputs.target, inputs.gold, cfg)?;
        let lock = state.store.lock(&id);
        let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
        state.store.create(&run)?;
        let mut run = run;
        Pipeline::new(state.provider.as_ref()).run_table_phase(&mut run)?;
        state.store.persist(&run)?;
        Ok(RunView::from(&run))
    })
    .await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_run(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<RunView> {
    let run = blocking(move || state.store.load(&id)).await?;
    Ok(Json(RunView::from(&run)))
}

async fn list_candidates(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<CandidateList> {
    let run = blocking(move || {
        let run = state.store.load(&id)?;
        at_least(&run, Phase::TableMatchingDone, "table candidates")?;
        Ok(run)
    })
    .await?;
    Ok(Json(CandidateList {
        run_id: run.run_id,
        phase: run.phase,
        candidates: run.candidates,
    }))
}

async fn decide(
    State(state): State<Arc<AppState>>,
    Path((id, cid)): Path<(String, String)>,
    body: Result<Json<DecisionBody>, JsonRejection>,
) -> ApiResult<DecisionResult> {
    let Json(body) = body?;
    let (run, candidate) = blocking(move || {
        mutate(&state, &id, |run| {
            run.apply_decision(&cid, body.decision)?;
            Ok(run.candidate(&cid).expect("decided candidate exists").clone())
        })
    })
    .await?;
    Ok(Json(DecisionResult {
        run_id: run.run_id,
        phase: run.phase,
        candidate,
    }))
}

async fn advance(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<RunView> {
    let (run, _) = blocking(move || {
        let provider = state.provider.clone();
        mutate(&state, &id, |run| Pipeline::new(provider.as_ref()).advance(run))
    })
    .await?;
    Ok(Json(RunView::from(&run)))
}

async fn correspondences(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<CorrespondenceList> {
    let run = blocking(move || {
        let run = state.store.load(&id)?;
        at_least(&run, Phase::AttributeMatchingDone, "correspondences")?;
        Ok(run)
    })
    .await?;
    Ok(Json(CorrespondenceList {
        run_id: run.run_id,
        correspondences: run.correspondences,
    }))
}

async fn report(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<ReportView> {
    let run = blocking(move || {
        let run = state.store.load(&id)?;
        at_least(&run, Phase::Reported, "reports")?;
        Ok(run)
    })
    .await?;
    Ok(Json(ReportView {
        run_id: run.run_id,
        report: run.report,
    }))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/runs", post(create_run))
        .route("/runs/{id}", get(get_run))
        .route("/runs/{id}/table-candidates", get(list_candidates))
        .route("/runs/{id}/table-candidates/{cid}/decision", post(decide))
        .route("/runs/{id}/advance", post(advance))
        .route("/runs/{id}/correspondences", get(correspondences))
        .route("/runs/{id}/report", get(report))
        .with_state(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_overrides() {
        let defaults = MatchConfig::default();
        let cfg = layered_config(&defaults, Some(serde_json::json!({"t": 0.7, "sampling": {"n": 5}}))).unwrap();
        assert_eq!(cfg.t, 0.7);
        assert_eq!(cfg.sampling.n, 5);
        assert_eq!(cfg.sampling.strategy, defaults.sampling.strategy);
        assert!(layered_config(&defaults, Some(serde_json::json!({"t": 3.0}))).is_err());
        assert!(layered_config(&defaults, Some(serde_json::json!({"t": "high"}))).is_err());
    }
}
