//! HTTP gateway. Graphs and reports are stored as flat files under the
//! data directory and addressed by content hash; optimize runs are
//! in-memory jobs polled through `/jobs/{id}`.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::net::SocketAddr;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use plantgraph_core::{Algorithm, PlantGraph};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::gateway::{self, GatewayError, OptimizeRequest, SimulateRequest};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown {what} `{id}`"))
    }
}

impl From<GatewayError> for ApiError {
    fn from(e: GatewayError) -> Self {
        let status = if e.is_input_error() {
            StatusCode::BAD_REQUEST
        } else {
            StatusCode::INTERNAL_SERVER_ERROR
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<plantgraph_core::Error> for ApiError {
    fn from(e: plantgraph_core::Error) -> Self {
        GatewayError::from(e).into()
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

/// Content-addressed flat-file store with an in-memory graph cache.
struct Store {
    graphs_dir: PathBuf,
    reports_dir: PathBuf,
    cache: RwLock<HashMap<String, Arc<PlantGraph>>>,
}

fn is_content_id(id: &str) -> bool {
    id.len() == 64 && id.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

impl Store {
    fn open(data_dir: &Path) -> io::Result<Self> {
        let graphs_dir = data_dir.join("graphs");
        let reports_dir = data_dir.join("reports");
        fs::create_dir_all(&graphs_dir)?;
        fs::create_dir_all(&reports_dir)?;
        Ok(Store {
            graphs_dir,
            reports_dir,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Returns the graph id and whether it was new.
    fn put_graph(&self, g: PlantGraph) -> io::Result<(String, bool)> {
        let id = g.fingerprint();
        let path = self.graphs_dir.join(format!("{id}.json"));
        let created = !path.exists();
        if created {
            fs::write(&path, g.save())?;
        }
        self.cache.write().unwrap().insert(id.clone(), Arc::new(g));
        Ok((id, created))
    }

    fn graph(&self, id: &str) -> ApiResult<Arc<PlantGraph>> {
        if let Some(g) = self.cache.read().unwrap().get(id) {
            return Ok(g.clone());
        }
        if !is_content_id(id) {
            return Err(ApiError::not_found("graph", id));
        }
        let text = fs::read_to_string(self.graphs_dir.join(format!("{id}.json")))
            .map_err(|_| ApiError::not_found("graph", id))?;
        let g = Arc::new(PlantGraph::load(&text)?);
        self.cache.write().unwrap().insert(id.to_string(), g.clone());
        Ok(g)
    }

    fn put_report(&self, text: &str) -> io::Result<String> {
        let id = gateway::content_id(text);
        fs::write(self.reports_dir.join(format!("{id}.json")), text)?;
        Ok(id)
    }

    fn report(&self, id: &str) -> ApiResult<String> {
        if !is_content_id(id) {
            return Err(ApiError::not_found("report", id));
        }
        fs::read_to_string(self.reports_dir.join(format!("{id}.json"))).map_err(|_| ApiError::not_found("report", id))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum JobState {
    Running,
    Completed { report_id: String },
    Failed { error: String },
    Cancelled,
}

struct Job {
    id: String,
    graph_id: String,
    total: usize,
    progress: AtomicUsize,
    cancel: AtomicBool,
    state: Mutex<JobState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobView {
    pub id: String,
    pub graph_id: String,
    /// `running`, `completed`, `failed` or `cancelled`.
    pub status: String,
    /// Last finished generation.
    pub progress: usize,
    pub total: usize,
    pub cancel_requested: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Job {
    fn view(&self) -> JobView {
        let state = self.state.lock().unwrap().clone();
        let (status, report_id, error) = match state {
            JobState::Running => ("running", None, None),
            JobState::Completed { report_id } => ("completed", Some(report_id), None),
            JobState::Failed { error } => ("failed", None, Some(error)),
            JobState::Cancelled => ("cancelled", None, None),
        };
        JobView {
            id: self.id.clone(),
            graph_id: self.graph_id.clone(),
            status: status.to_string(),
            progress: self.progress.load(Ordering::SeqCst),
            total: self.total,
            cancel_requested: self.cancel.load(Ordering::SeqCst),
            report_id,
            error,
        }
    }
}

pub struct AppState {
    store: Store,
    jobs: Mutex<HashMap<String, Arc<Job>>>,
    /// Running job per graph id.
    active: Mutex<HashMap<String, String>>,
    next_job: AtomicU64,
}

impl AppState {
    pub fn open(data_dir: &Path) -> io::Result<Arc<Self>> {
        Ok(Arc::new(AppState {
            store: Store::open(data_dir)?,
            jobs: Mutex::new(HashMap::new()),
            active: Mutex::new(HashMap::new()),
            next_job: AtomicU64::new(1),
        }))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/graphs", post(upload_graph))
        .route("/graphs/{id}", get(get_graph))
        .route("/graphs/{id}/measures", get(get_measures))
        .route("/graphs/{id}/simulate", post(simulate))
        .route("/graphs/{id}/optimize", post(optimize))
        .route("/jobs/{id}", get(get_job).delete(cancel_job))
        .route("/reports/{id}", get(get_report))
        .layer(DefaultBodyLimit::max(32 * 1024 * 1024))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, data_dir: &Path) -> io::Result<()> {
    let app = router(AppState::open(data_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("plantgraph listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn json_body(status: StatusCode, location: Option<String>, text: String) -> Response {
    let mut resp = (status, [(header::CONTENT_TYPE, "application/json")], text).into_response();
    if let Some(loc) = location {
        resp.headers_mut()
            .insert(header::LOCATION, HeaderValue::from_str(&loc).expect("ascii path"));
    }
    resp
}

fn parse<T: serde::de::DeserializeOwned>(body: &str) -> ApiResult<T> {
    serde_json::from_str(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

async fn upload_graph(State(app): State<Arc<AppState>>, body: String) -> ApiResult<Response> {
    let g = PlantGraph::load(&body)?;
    let summary = gateway::summarize(&g);
    let (id, created) = app.store.put_graph(g).map_err(internal)?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok(json_body(
        status,
        Some(format!("/graphs/{id}")),
        serde_json::to_string_pretty(&summary).expect("serializable"),
    ))
}

async fn get_graph(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let g = app.store.graph(&id)?;
    Ok(json_body(StatusCode::OK, None, g.save()))
}

#[derive(Debug, Deserialize)]
struct MeasuresQuery {
    #[serde(default)]
    algorithm: Algorithm,
}

async fn get_measures(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<MeasuresQuery>,
) -> ApiResult<Response> {
    let g = app.store.graph(&id)?;
    let report = tokio::task::spawn_blocking(move || gateway::measures_report(&g, q.algorithm))
        .await
        .map_err(internal)??;
    Ok(json_body(
        StatusCode::OK,
        None,
        serde_json::to_string_pretty(&report).expect("serializable"),
    ))
}

async fn simulate(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: String) -> ApiResult<Response> {
    let g = app.store.graph(&id)?;
    let req: SimulateRequest = parse(&body)?;
    let report = tokio::task::spawn_blocking(move || gateway::simulate(&g, &req))
        .await
        .map_err(internal)??;
    let text = gateway::report_json(&report);
    let report_id = app.store.put_report(&text).map_err(internal)?;
    Ok(json_body(
        StatusCode::CREATED,
        Some(format!("/reports/{report_id}")),
        text,
    ))
}

async fn optimize(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: String) -> ApiResult<Response> {
    let g = app.store.graph(&id)?;
    let req: OptimizeRequest = parse(&body)?;
    let prepared = gateway::prepare_optimize(&g, &req)?;

    let job = {
        let mut active = app.active.lock().unwrap();
        if let Some(running) = active.get(&id) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("graph `{id}` already has a running optimize job `{running}`"),
            ));
        }
        let job = Arc::new(Job {
            id: format!("job-{}", app.next_job.fetch_add(1, Ordering::SeqCst)),
            graph_id: id.clone(),
            total: req.generations(),
            progress: AtomicUsize::new(0),
            cancel: AtomicBool::new(false),
            state: Mutex::new(JobState::Running),
        });
        active.insert(id.clone(), job.id.clone());
        app.jobs.lock().unwrap().insert(job.id.clone(), job.clone());
        job
    };

    let (worker_app, worker_job) = (app.clone(), job.clone());
    tokio::task::spawn_blocking(move || {
        let result = gateway::run_prepared(&g, &prepared, |stats| {
            worker_job.progress.store(stats.generation, Ordering::SeqCst);
            if worker_job.cancel.load(Ordering::SeqCst) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        let mut state = worker_job.state.lock().unwrap();
        *state = match result {
            _ if worker_job.cancel.load(Ordering::SeqCst) => JobState::Cancelled,
            Ok(report) => match worker_app.store.put_report(&gateway::report_json(&report)) {
                Ok(report_id) => {
                    worker_job.progress.store(worker_job.total, Ordering::SeqCst);
                    JobState::Completed { report_id }
                }
                Err(e) => JobState::Failed { error: e.to_string() },
            },
            Err(e) => JobState::Failed { error: e.to_string() },
        };
        worker_app.active.lock().unwrap().remove(&worker_job.graph_id);
    });

    let view = job.view();
    Ok(json_body(
        StatusCode::ACCEPTED,
        Some(format!("/jobs/{}", view.id)),
        serde_json::to_string_pretty(&view).expect("serializable"),
    ))
}

fn find_job(app: &AppState, id: &str) -> ApiResult<Arc<Job>> {
    app.jobs
        .lock()
        .unwrap()
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("job", id))
}

async fn get_job(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<JobView>> {
    Ok(Json(find_job(&app, &id)?.view()))
}

async fn cancel_job(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let job = find_job(&app, &id)?;
    {
        // the worker settles the final state under the same lock
        let state = job.state.lock().unwrap();
        if *state != JobState::Running {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("job `{id}` has already finished"),
            ));
        }
        job.cancel.store(true, Ordering::SeqCst);
    }
    Ok((StatusCode::ACCEPTED, Json(job.view())).into_response())
}

async fn get_report(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    Ok(json_body(StatusCode::OK, None, app.store.report(&id)?))
}
