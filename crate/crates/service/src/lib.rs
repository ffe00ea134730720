//! HTTP session API for the pivot engine.
//!
//! Sessions live in server memory and every mutating call answers with the
//! full session JSON. Each session sits behind its own lock; graph snapshots
//! are shared read-only, and an applied adaptation publishes a new snapshot
//! that sessions created afterwards (or cleared) pick up.

mod error;

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use pivotladder::adaptive::{
    apply_rewrite, detect_patterns, equivalence_report, AdaptConfig, AdaptationProposal,
    EquivalenceReport, UsageLog,
};
use pivotladder::ambiguity::{classify, decide, explain, AmbiguityReport, Explanation, HeuristicDecision};
use pivotladder::dsl::{parse, StmtKind};
use pivotladder::graph::{export_subgraph, load_graph, Direction, GraphFormat, PropertyGraph};
use pivotladder::pivot::{
    Binning, ChainDescription, FilterId, HistogramSort, PivotMode, Predicate, Session, SessionView,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

pub use error::{ApiError, ServeError};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub adapt: AdaptConfig,
    /// Sessions untouched for this long are dropped by [`AppState::sweep_idle`].
    pub idle_timeout: Duration,
    /// Append recorded chains here as NDJSON.
    pub usage_log_path: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            adapt: AdaptConfig::default(),
            idle_timeout: Duration::from_secs(30 * 60),
            usage_log_path: None,
        }
    }
}

struct Entry {
    session: Session,
    last_activity: Instant,
}

struct Shared {
    graph: RwLock<Arc<PropertyGraph>>,
    sessions: Mutex<BTreeMap<String, Arc<Mutex<Entry>>>>,
    usage: Mutex<UsageLog>,
    proposals: Mutex<Vec<AdaptationProposal>>,
    next_session: AtomicU64,
    config: ServiceConfig,
}

#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl AppState {
    pub fn new(graph: PropertyGraph, config: ServiceConfig) -> Self {
        Self::with_usage_log(graph, config, UsageLog::new())
    }

    pub fn with_usage_log(graph: PropertyGraph, config: ServiceConfig, usage: UsageLog) -> Self {
        AppState {
            shared: Arc::new(Shared {
                graph: RwLock::new(Arc::new(graph)),
                sessions: Mutex::new(BTreeMap::new()),
                usage: Mutex::new(usage),
                proposals: Mutex::new(Vec::new()),
                next_session: AtomicU64::new(1),
                config,
            }),
        }
    }

    /// The snapshot new sessions start from.
    pub fn graph(&self) -> Arc<PropertyGraph> {
        let g = self.shared.graph.read().unwrap_or_else(|p| p.into_inner());
        Arc::clone(&g)
    }

    fn publish(&self, g: PropertyGraph) -> Arc<PropertyGraph> {
        let g = Arc::new(g);
        *self.shared.graph.write().unwrap_or_else(|p| p.into_inner()) = Arc::clone(&g);
        g
    }

    pub fn usage_log(&self) -> UsageLog {
        lock(&self.shared.usage).clone()
    }

    pub fn session_count(&self) -> usize {
        lock(&self.shared.sessions).len()
    }

    pub fn create_session(&self) -> (String, SessionView) {
        let n = self.shared.next_session.fetch_add(1, Ordering::Relaxed);
        let id = format!("s{n}");
        let session = Session::new(self.graph());
        let view = session.view();
        let entry = Entry {
            session,
            last_activity: Instant::now(),
        };
        lock(&self.shared.sessions).insert(id.clone(), Arc::new(Mutex::new(entry)));
        (id, view)
    }

    /// Run `f` on one session while holding its lock.
    pub fn with_session<R>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> Result<R, ApiError>,
    ) -> Result<R, ApiError> {
        let entry = lock(&self.shared.sessions)
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))?;
        let mut e = lock(&entry);
        e.last_activity = Instant::now();
        f(&mut e.session)
    }

    /// Drop sessions idle longer than the configured timeout.
    pub fn sweep_idle(&self) -> usize {
        self.sweep_older_than(self.shared.config.idle_timeout)
    }

    pub fn sweep_older_than(&self, idle: Duration) -> usize {
        let now = Instant::now();
        let mut sessions = lock(&self.shared.sessions);
        let before = sessions.len();
        sessions.retain(|_, entry| now.duration_since(lock(entry).last_activity) < idle);
        before - sessions.len()
    }

    /// Append a chain's signatures to the usage log, then auto-apply if
    /// configured.
    fn record_chain(&self, session_id: &str, session: &Session) -> Result<(), ApiError> {
        if session.is_empty() {
            return Ok(());
        }
        {
            let mut usage = lock(&self.shared.usage);
            let added = usage.record_chain(session_id, now_millis(), session).to_vec();
            if let (Some(path), false) = (&self.shared.config.usage_log_path, added.is_empty()) {
                let mut file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| ApiError::UsageLog(e.to_string()))?;
                file.write_all(UsageLog::lines(&added).as_bytes())
                    .map_err(|e| ApiError::UsageLog(e.to_string()))?;
            }
        }
        if self.shared.config.adapt.auto_apply {
            let proposals = detect_patterns(&lock(&self.shared.usage), &self.shared.config.adapt)?;
            let mut g = self.graph();
            let mut changed = false;
            for p in &proposals {
                // already-applied rewrites collide and are skipped
                if let Ok(next) = apply_rewrite(&g, &p.rewrite) {
                    g = Arc::new(next);
                    changed = true;
                }
            }
            if changed {
                self.publish((*g).clone());
            }
        }
        Ok(())
    }

    pub fn proposals(&self) -> Result<Vec<AdaptationProposal>, ApiError> {
        let found = detect_patterns(&lock(&self.shared.usage), &self.shared.config.adapt)?;
        *lock(&self.shared.proposals) = found.clone();
        Ok(found)
    }

    pub fn apply_proposal(&self, id: u32) -> Result<Applied, ApiError> {
        let mut known = lock(&self.shared.proposals).clone();
        if known.is_empty() {
            known = self.proposals()?;
        }
        let p = known
            .iter()
            .find(|p| p.id == id)
            .ok_or(ApiError::UnknownProposal(id))?;
        let g = self.graph();
        let next = apply_rewrite(&g, &p.rewrite)?;
        let report = equivalence_report(&g, &next, &p.rewrite)?;
        let published = self.publish(next);
        Ok(Applied {
            proposal: p.clone(),
            graph_version: published.version(),
            report,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionResponse {
    pub session_id: String,
    #[serde(flatten)]
    pub session: SessionView,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Applied {
    pub proposal: AdaptationProposal,
    pub graph_version: u64,
    pub report: EquivalenceReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub report: AmbiguityReport,
    pub decision: HeuristicDecision,
    pub explanation: Explanation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescribeResponse {
    pub description: ChainDescription,
    pub text: String,
}

/// Predicates given either as JSON or as DSL text (`name == "x" and ...`).
#[derive(Debug, Default, Deserialize)]
struct Predicates {
    #[serde(default)]
    predicates: Vec<Predicate>,
    #[serde(default, rename = "where")]
    text: Option<String>,
}

impl Predicates {
    fn resolve(self) -> Result<Vec<Predicate>, ApiError> {
        let mut out = self.predicates;
        if let Some(text) = self.text {
            let script = parse(&format!("filter {text};"))?;
            match script.statements.into_iter().next().map(|s| s.kind) {
                Some(StmtKind::Filter { predicates }) => out.extend(predicates),
                _ => return Err(ApiError::Body("`where` must be one predicate list".into())),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
struct SelectBody {
    class: String,
    #[serde(flatten)]
    predicates: Predicates,
}

#[derive(Debug, Deserialize)]
struct PivotBody {
    class: String,
    #[serde(default, alias = "via")]
    edge_class: Option<String>,
    #[serde(default)]
    direction: Direction,
    #[serde(default)]
    mode: PivotMode,
}

#[derive(Debug, Deserialize)]
struct GroupBody {
    key: String,
    #[serde(default)]
    sort: HistogramSort,
    #[serde(default)]
    binning: Binning,
}

#[derive(Debug, Deserialize)]
struct BinsBody {
    key: String,
    labels: Vec<String>,
    #[serde(default)]
    binning: Binning,
}

#[derive(Debug, Default, Deserialize)]
struct ScopeBody {
    /// Absent: toggle.
    global: Option<bool>,
}

#[derive(Debug, Deserialize)]
struct ClassQuery {
    class: String,
}

#[derive(Debug, Deserialize)]
struct FormatQuery {
    format: Option<String>,
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::Body(e.to_string()))
}

fn body_or_default<T: DeserializeOwned + Default>(bytes: &Bytes) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        Ok(T::default())
    } else {
        body(bytes)
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn respond(id: &str, s: &Session) -> SessionResponse {
    SessionResponse {
        session_id: id.to_string(),
        session: s.view(),
    }
}

fn mutate(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session) -> Result<(), ApiError>,
) -> ApiResult<SessionResponse> {
    state
        .with_session(id, |s| {
            f(s)?;
            Ok(respond(id, s))
        })
        .map(Json)
}

async fn schema(State(state): State<AppState>) -> Response {
    Json(state.graph().schema_summary()).into_response()
}

async fn create(State(state): State<AppState>) -> Response {
    let (id, session) = state.create_session();
    (
        StatusCode::CREATED,
        Json(SessionResponse {
            session_id: id,
            session,
        }),
    )
        .into_response()
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<SessionResponse> {
    mutate(&state, &id, |_| Ok(()))
}

async fn select(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<SessionResponse> {
    let b: SelectBody = body(&bytes)?;
    let predicates = b.predicates.resolve()?;
    mutate(&state, &id, |s| {
        s.select_seed(&b.class, predicates)?;
        Ok(())
    })
}

async fn pivot(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<SessionResponse> {
    let b: PivotBody = body(&bytes)?;
    mutate(&state, &id, |s| {
        s.pivot(&b.class, b.edge_class.as_deref(), b.direction, b.mode)?;
        Ok(())
    })
}

async fn filter(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<SessionResponse> {
    let predicates = body::<Predicates>(&bytes)?.resolve()?;
    mutate(&state, &id, |s| {
        s.apply_filter(predicates)?;
        Ok(())
    })
}

async fn group(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Response {
    let result = body::<GroupBody>(&bytes).and_then(|b| {
        state.with_session(&id, |s| Ok(s.group_by(&b.key, b.sort, b.binning)?))
    });
    match result {
        Ok(view) => Json(view).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn bins(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<SessionResponse> {
    let b: BinsBody = body(&bytes)?;
    mutate(&state, &id, |s| {
        s.select_bins(&b.key, b.binning, &b.labels)?;
        Ok(())
    })
}

async fn snip(
    State(state): State<AppState>,
    Path((id, filter)): Path<(String, u32)>,
) -> ApiResult<SessionResponse> {
    mutate(&state, &id, |s| Ok(s.snip_filter(FilterId(filter))?))
}

async fn restore(
    State(state): State<AppState>,
    Path((id, filter)): Path<(String, u32)>,
) -> ApiResult<SessionResponse> {
    mutate(&state, &id, |s| Ok(s.restore_filter(FilterId(filter))?))
}

async fn scope(
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<SessionResponse> {
    let b: ScopeBody = body_or_default(&bytes)?;
    mutate(&state, &id, |s| {
        match b.global {
            Some(on) => s.set_global_scope(on),
            None => s.toggle_global_scope(),
        }
        Ok(())
    })
}

async fn undo(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<SessionResponse> {
    mutate(&state, &id, |s| {
        s.undo()?;
        Ok(())
    })
}

async fn clear(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<SessionResponse> {
    let st = state.clone();
    mutate(&state, &id, |s| {
        st.record_chain(&id, s)?;
        *s = Session::new(st.graph());
        Ok(())
    })
}

async fn classify_pivot(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ClassQuery>,
) -> ApiResult<ClassifyResponse> {
    state
        .with_session(&id, |s| {
            let report = classify(s, &q.class)?;
            let decision = decide(&report);
            let explanation = explain(s, &report, &decision);
            Ok(ClassifyResponse {
                report,
                decision,
                explanation,
            })
        })
        .map(Json)
}

async fn describe(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<DescribeResponse> {
    state
        .with_session(&id, |s| {
            let description = s.describe_chain();
            let text = description.to_string();
            Ok(DescribeResponse { description, text })
        })
        .map(Json)
}

async fn export(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<FormatQuery>,
) -> Result<Response, ApiError> {
    let format = match q.format.as_deref() {
        Some(f) => f.parse::<GraphFormat>()?,
        None => GraphFormat::Json,
    };
    let doc = state.with_session(&id, |s| {
        let x = s.current_subgraph()?;
        let doc = export_subgraph(s.graph(), &x, format)?;
        state.record_chain(&id, s)?;
        Ok(doc)
    })?;
    let content_type = match format {
        GraphFormat::Json => "application/json",
        GraphFormat::Graphml => "application/xml",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], doc).into_response())
}

async fn proposals(State(state): State<AppState>) -> ApiResult<Vec<AdaptationProposal>> {
    state.proposals().map(Json)
}

async fn apply(State(state): State<AppState>, Path(id): Path<u32>) -> ApiResult<Applied> {
    state.apply_proposal(id).map(Json)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/schema", get(schema))
        .route("/api/session", post(create))
        .route("/api/session/{id}", get(get_session))
        .route("/api/session/{id}/select", post(select))
        .route("/api/session/{id}/pivot", post(pivot))
        .route("/api/session/{id}/filter", post(filter))
        .route("/api/session/{id}/group", post(group))
        .route("/api/session/{id}/bins", post(bins))
        .route("/api/session/{id}/snip/{filter}", post(snip))
        .route("/api/session/{id}/restore/{filter}", post(restore))
        .route("/api/session/{id}/scope", post(scope))
        .route("/api/session/{id}/undo", post(undo))
        .route("/api/session/{id}/clear", post(clear))
        .route("/api/session/{id}/classify", get(classify_pivot))
        .route("/api/session/{id}/describe", get(describe))
        .route("/api/session/{id}/export", get(export))
        .route("/api/adapt/proposals", get(proposals))
        .route("/api/adapt/apply/{id}", post(apply))
        .with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub host: String,
    pub port: u16,
    pub graph_path: PathBuf,
    pub service: ServiceConfig,
}

/// Load the graph and usage log and bind the listener.
pub async fn bind(config: &ServeConfig) -> Result<(TcpListener, AppState), ServeError> {
    let path = config.graph_path.display().to_string();
    let text = std::fs::read_to_string(&config.graph_path).map_err(|e| ServeError::GraphFile {
        path: path.clone(),
        message: e.to_string(),
    })?;
    let graph = load_graph(&text, GraphFormat::from_path(&path))
        .map_err(|source| ServeError::Graph { path, source })?;
    let usage = match &config.service.usage_log_path {
        Some(p) if p.exists() => {
            let text = std::fs::read_to_string(p).map_err(|e| ServeError::UsageLog {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            UsageLog::from_ndjson(&text).map_err(|e| ServeError::UsageLog {
                path: p.display().to_string(),
                message: e.to_string(),
            })?
        }
        _ => UsageLog::new(),
    };
    let state = AppState::with_usage_log(graph, config.service.clone(), usage);
    let listener = TcpListener::bind((config.host.as_str(), config.port))
        .await
        .map_err(|source| ServeError::Bind {
            port: config.port,
            source,
        })?;
    Ok((listener, state))
}

/// Serve until the process is stopped, sweeping idle sessions in the
/// background.
pub async fn run(listener: TcpListener, state: AppState) -> Result<(), ServeError> {
    let sweeper = state.clone();
    let period = (sweeper.shared.config.idle_timeout / 2).clamp(
        Duration::from_millis(100),
        Duration::from_secs(60),
    );
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            sweeper.sweep_idle();
        }
    });
    axum::serve(listener, router(state)).await?;
    Ok(())
}

pub async fn serve(config: ServeConfig) -> Result<SocketAddr, ServeError> {
    let (listener, state) = bind(&config).await?;
    let addr = listener.local_addr()?;
    run(listener, state).await?;
    Ok(addr)
}
