//! Read-only HTTP service over a workspace snapshot.
//!
//! Response bodies are the same bytes `--format json` prints for the same
//! request. A snapshot is loaded once and replaced as a whole on reload;
//! requests already holding the old one finish on it.

use std::collections::{BTreeSet, HashMap};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use lru::LruCache;
use perfchain::seconds::Seconds;
use perfchain::slice::ChopResult;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::cli::report_json;
use crate::error::WorkbenchError;
use crate::session::{Session, DEFAULT_MIN_DELTA};
use crate::store::to_json;

pub const CACHE_ENTRIES: usize = 64;

/// One loaded state of the workspace. Never mutated except for the chops
/// computed from it, which `/api/source` looks up by id.
pub struct Snapshot {
    pub generation: u64,
    pub session: Session,
    chops: Mutex<HashMap<String, Arc<ChopResult>>>,
}

impl Snapshot {
    fn new(generation: u64, session: Session) -> Self {
        Snapshot {
            generation,
            session,
            chops: Mutex::new(HashMap::new()),
        }
    }
}

pub struct AppState {
    root: PathBuf,
    current: RwLock<Arc<Snapshot>>,
    cache: Mutex<LruCache<(u64, String), Arc<str>>>,
}

impl AppState {
    pub fn load(root: &Path) -> Result<Arc<Self>, WorkbenchError> {
        let session = Session::load(root)?;
        Ok(Arc::new(AppState {
            root: root.to_path_buf(),
            current: RwLock::new(Arc::new(Snapshot::new(1, session))),
            cache: Mutex::new(LruCache::new(NonZeroUsize::new(CACHE_ENTRIES).expect("nonzero"))),
        }))
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock").clone()
    }

    /// Re-reads the workspace. On failure the current snapshot stays.
    pub fn reload(&self) -> Result<u64, WorkbenchError> {
        let session = Session::load(&self.root)?;
        let mut cur = self.current.write().expect("snapshot lock");
        let generation = cur.generation + 1;
        *cur = Arc::new(Snapshot::new(generation, session));
        Ok(generation)
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    fn cached(
        &self,
        snap: &Snapshot,
        key: String,
        compute: impl FnOnce() -> Result<String, ApiError>,
    ) -> Result<Arc<str>, ApiError> {
        let key = (snap.generation, key);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let body: Arc<str> = compute()?.into();
        self.cache.lock().expect("cache lock").put(key, body.clone());
        Ok(body)
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl From<WorkbenchError> for ApiError {
    fn from(e: WorkbenchError) -> Self {
        let status = match &e {
            WorkbenchError::UnknownConfig(_) | WorkbenchError::NotMeasured(_) => StatusCode::NOT_FOUND,
            WorkbenchError::Stale { .. } | WorkbenchError::Missing { .. } => StatusCode::CONFLICT,
            WorkbenchError::Usage(_)
            | WorkbenchError::Config(_)
            | WorkbenchError::Model(_)
            | WorkbenchError::Slice(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = to_json(&ErrorBody { error: &self.message });
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

fn json_response(body: impl Into<String>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body.into()).into_response()
}

fn parse_body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed request: {e}")))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/options", get(options))
        .route("/api/configs", get(configs))
        .route("/api/influencing-options", post(influencing_options))
        .route("/api/option-hotspots", post(option_hotspots))
        .route("/api/profile-diff", post(profile_diff))
        .route("/api/cause-effect", post(cause_effect))
        .route("/api/source", get(source))
        .route("/api/reload", post(reload))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(root: &Path, port: u16) -> Result<(), WorkbenchError> {
    let state = AppState::load(root)?;
    let addr = std::net::SocketAddr::from(([127, 0, 0, 1], port));
    let io = |source| WorkbenchError::Io {
        path: root.to_path_buf(),
        source,
    };
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(io)?;
    eprintln!("serving {} on http://{addr}", root.display());
    axum::serve(listener, router(state)).await.map_err(io)
}

#[derive(Serialize)]
struct OptionInfo<'a> {
    name: &'a str,
    domain: &'a perfchain::lang::Domain,
    default: &'a perfchain::lang::Value,
}

#[derive(Serialize)]
struct OptionsBody<'a> {
    generation: u64,
    options: Vec<OptionInfo<'a>>,
}

async fn options(State(st): State<Arc<AppState>>) -> Response {
    let snap = st.snapshot();
    let body = OptionsBody {
        generation: snap.generation,
        options: snap
            .session
            .workspace
            .program
            .options
            .iter()
            .map(|o| OptionInfo {
                name: &o.name,
                domain: &o.domain,
                default: &o.default,
            })
            .collect(),
    };
    json_response(to_json(&body))
}

#[derive(Serialize)]
struct ConfigsBody<'a> {
    generation: u64,
    base: &'a str,
    configs: &'a std::collections::BTreeMap<String, perfchain::config::Configuration>,
}

async fn configs(State(st): State<Arc<AppState>>) -> Response {
    let snap = st.snapshot();
    let m = &snap.session.workspace.manifest;
    json_response(to_json(&ConfigsBody {
        generation: snap.generation,
        base: &m.base,
        configs: &m.configs,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRequest {
    from: String,
    to: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HotspotRequest {
    from: String,
    to: String,
    #[serde(default)]
    min_delta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainRequest {
    from: String,
    to: String,
    /// Defaults to the options of the stored hotspots report.
    #[serde(default)]
    options: Option<BTreeSet<String>>,
    /// Defaults to the functions of the stored hotspots report.
    #[serde(default)]
    hotspots: Option<BTreeSet<String>>,
}

async fn influencing_options(State(st): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: PairRequest = parse_body(&body)?;
    let snap = st.snapshot();
    let out = st.cached(&snap, format!("influencing-options\n{}\n{}", req.from, req.to), || {
        Ok(report_json(&snap.session.influencing_options(&req.from, &req.to)?))
    })?;
    Ok(json_response(&*out))
}

async fn option_hotspots(State(st): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: HotspotRequest = parse_body(&body)?;
    let min_delta = match req.min_delta {
        None => DEFAULT_MIN_DELTA,
        Some(d) if d.is_finite() && d >= 0.0 => Seconds::from_secs_f64(d),
        Some(_) => return Err(ApiError::new(StatusCode::BAD_REQUEST, "min_delta must be a non-negative number")),
    };
    let snap = st.snapshot();
    let key = format!("option-hotspots\n{}\n{}\n{}", req.from, req.to, min_delta.nanos());
    let out = st.cached(&snap, key, || {
        Ok(report_json(&snap.session.option_hotspots(&req.from, &req.to, min_delta)?))
    })?;
    Ok(json_response(&*out))
}

async fn profile_diff(State(st): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: PairRequest = parse_body(&body)?;
    let snap = st.snapshot();
    let out = st.cached(&snap, format!("profile-diff\n{}\n{}", req.from, req.to), || {
        let s = &snap.session;
        let hot = s.stored_hotspots(&req.from, &req.to)?;
        Ok(report_json(&s.profile_diff(&req.from, &req.to, hot.as_ref())?))
    })?;
    Ok(json_response(&*out))
}

async fn cause_effect(State(st): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: ChainRequest = parse_body(&body)?;
    let snap = st.snapshot();
    let s = &snap.session;
    let (options, hotspots) = match (req.options, req.hotspots) {
        (Some(o), Some(h)) => (o, h),
        (o, h) => {
            let report = s.stored_hotspots(&req.from, &req.to)?.ok_or_else(|| WorkbenchError::Missing {
                what: format!("hotspots report for {} -> {}", req.from, req.to),
                hint: "run hotspots first or pass options and hotspots".into(),
            })?;
            let (ro, rh) = Session::chain_inputs(&report);
            (o.unwrap_or(ro), h.unwrap_or(rh))
        }
    };
    let key = format!(
        "cause-effect\n{}\n{}\n{}\n{}",
        req.from,
        req.to,
        options.iter().cloned().collect::<Vec<_>>().join("\u{1f}"),
        hotspots.iter().cloned().collect::<Vec<_>>().join("\u{1f}")
    );
    let out = st.cached(&snap, key, || {
        let chop = s.cause_effect(&req.from, &req.to, &options, &hotspots)?;
        let json = report_json(&chop);
        snap.chops.lock().expect("chop lock").insert(chop.chop_id.clone(), Arc::new(chop));
        Ok(json)
    })?;
    Ok(json_response(&*out))
}

#[derive(Deserialize)]
struct SourceQuery {
    file: String,
    #[serde(default)]
    chop_id: Option<String>,
}

#[derive(Serialize)]
struct SourceBody<'a> {
    file: &'a str,
    source: &'a str,
    highlights: Vec<SourceHighlight>,
}

/// Highlight range with both byte offsets and 1-based line/column.
#[derive(Serialize)]
struct SourceHighlight {
    start: usize,
    end: usize,
    line: usize,
    column: usize,
    end_line: usize,
    end_column: usize,
    node: perfchain::lang::NodeId,
}

async fn source(State(st): State<Arc<AppState>>, Query(q): Query<SourceQuery>) -> Result<Response, ApiError> {
    let snap = st.snapshot();
    let ws = &snap.session.workspace;
    if q.file != ws.manifest.program {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown file `{}`", q.file)));
    }
    let mut highlights = Vec::new();
    if let Some(id) = &q.chop_id {
        let chop = snap
            .chops
            .lock()
            .expect("chop lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown chop `{id}`")))?;
        for h in chop.highlights.get(&q.file).into_iter().flatten() {
            let (line, column) = perfchain::lang::line_col(&ws.source, h.span.start);
            let (end_line, end_column) = perfchain::lang::line_col(&ws.source, h.span.end);
            highlights.push(SourceHighlight {
                start: h.span.start,
                end: h.span.end,
                line,
                column,
                end_line,
                end_column,
                node: h.node,
            });
        }
    }
    Ok(json_response(to_json(&SourceBody {
        file: &q.file,
        source: &ws.source,
        highlights,
    })))
}

#[derive(Serialize)]
struct ReloadBody {
    generation: u64,
}

async fn reload(State(st): State<Arc<AppState>>) -> Result<Response, ApiError> {
    match st.reload() {
        Ok(generation) => Ok(json_response(to_json(&ReloadBody { generation }))),
        Err(e) => Err(ApiError::new(StatusCode::CONFLICT, e.to_string())),
    }
}
