use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use super::ast::{Script, SortOrder, Statement, StmtKind};
use super::Span;
use crate::adaptive::{
    apply_rewrite, detect_patterns, equivalence_report, AdaptConfig, AdaptError,
    AdaptationProposal, EquivalenceReport, UsageLog,
};
use crate::graph::{export_subgraph, load_graph, GraphError, GraphFormat, PropertyGraph};
use crate::pivot::{
    Binning, ChainDescription, HistogramSort, HistogramView, PivotError, Session, SortKey,
};
use crate::graph::Direction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecErrorKind {
    #[error(transparent)]
    Pivot(#[from] PivotError),
    #[error(transparent)]
    Adapt(#[from] AdaptError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("no graph loaded; start the script with `load` or pass a graph")]
    NoGraph,
    #[error("`bins` needs a preceding `group by`")]
    NoGroup,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {kind}")]
pub struct ExecError {
    pub span: Span,
    pub kind: ExecErrorKind,
}

impl ExecError {
    pub fn code(&self) -> &'static str {
        match &self.kind {
            ExecErrorKind::Pivot(e) => e.code(),
            ExecErrorKind::Adapt(e) => e.code(),
            ExecErrorKind::Graph(e) => e.code(),
            ExecErrorKind::Io { .. } => "io",
            ExecErrorKind::NoGraph => "no_graph",
            ExecErrorKind::NoGroup => "no_group",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "output", rename_all = "snake_case")]
pub enum Output {
    Description(ChainDescription),
    Histogram(HistogramView),
    Exported {
        path: String,
        format: GraphFormat,
        nodes: usize,
        edges: usize,
    },
    Proposals {
        proposals: Vec<AdaptationProposal>,
    },
    Applied {
        proposal: u32,
        graph_version: u64,
        report: EquivalenceReport,
    },
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Description(d) if d.entries.is_empty() => f.write_str("(empty chain)"),
            Output::Description(d) => write!(f, "{d}"),
            Output::Histogram(h) => {
                write!(f, "{} ({} nodes)", h.attribute_key, h.total())?;
                for b in &h.bins {
                    write!(f, "\n  {:<16} {}", b.label, b.count)?;
                }
                Ok(())
            }
            Output::Exported {
                path,
                format,
                nodes,
                edges,
            } => write!(f, "exported {nodes} nodes, {edges} edges to {path} ({format})"),
            Output::Proposals { proposals } if proposals.is_empty() => {
                f.write_str("no proposals")
            }
            Output::Proposals { proposals } => {
                for (i, p) in proposals.iter().enumerate() {
                    if i > 0 {
                        f.write_str("\n")?;
                    }
                    write!(
                        f,
                        "#{} seen {}x: {}",
                        p.id,
                        p.occurrence_count,
                        serde_json::to_string(&p.rewrite).unwrap_or_default()
                    )?;
                }
                Ok(())
            }
            Output::Applied {
                proposal,
                graph_version,
                report,
            } => write!(
                f,
                "applied #{proposal}; graph version {graph_version}; equivalence {} over {} seed sets",
                if report.is_clean() { "holds" } else { "FAILS" },
                report.subsets_checked
            ),
        }
    }
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Runs scripts against a session, a usage log and the current graph.
///
/// Chains are recorded into the usage log on `clear` and `export`. A graph
/// published by `adapt apply` is picked up by the next session, after
/// `clear`.
pub struct Executor {
    graph: Option<Arc<PropertyGraph>>,
    session: Option<Session>,
    usage: UsageLog,
    config: AdaptConfig,
    base_dir: PathBuf,
    session_name: String,
    chains: usize,
    group: Option<(String, Binning)>,
    proposals: Vec<AdaptationProposal>,
}

impl Executor {
    pub fn new(graph: Option<Arc<PropertyGraph>>) -> Self {
        Executor {
            graph,
            session: None,
            usage: UsageLog::new(),
            config: AdaptConfig::default(),
            base_dir: PathBuf::from("."),
            session_name: "script".into(),
            chains: 0,
            group: None,
            proposals: Vec::new(),
        }
    }

    pub fn with_usage_log(mut self, log: UsageLog) -> Self {
        self.usage = log;
        self
    }

    pub fn with_config(mut self, config: AdaptConfig) -> Self {
        self.config = config;
        self
    }

    /// Directory relative paths in `load` and `export` resolve against.
    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    pub fn with_session_name(mut self, name: impl Into<String>) -> Self {
        self.session_name = name.into();
        self
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    pub fn graph(&self) -> Option<&Arc<PropertyGraph>> {
        self.graph.as_ref()
    }

    pub fn usage_log(&self) -> &UsageLog {
        &self.usage
    }

    /// Run every statement, stopping at the first error.
    pub fn run(&mut self, script: &Script) -> Result<Vec<Output>, ExecError> {
        let mut outputs = Vec::new();
        for st in &script.statements {
            outputs.extend(self.statement(st)?);
        }
        Ok(outputs)
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn session_mut(&mut self) -> Result<&mut Session, ExecErrorKind> {
        if self.session.is_none() {
            let g = self.graph.clone().ok_or(ExecErrorKind::NoGraph)?;
            self.session = Some(Session::new(g));
        }
        Ok(self.session.as_mut().unwrap())
    }

    fn record_chain(&mut self) {
        let Some(s) = &self.session else { return };
        if s.is_empty() {
            return;
        }
        self.chains += 1;
        let name = format!("{}-{}", self.session_name, self.chains);
        self.usage.record_chain(&name, now_millis(), s);
        if self.config.auto_apply {
            self.auto_apply();
        }
    }

    fn auto_apply(&mut self) {
        let (Some(g), Ok(proposals)) = (&self.graph, detect_patterns(&self.usage, &self.config))
        else {
            return;
        };
        let mut g = Arc::clone(g);
        for p in &proposals {
            // rewrites already in place fail with a collision and are skipped
            if let Ok(next) = apply_rewrite(&g, &p.rewrite) {
                g = Arc::new(next);
            }
        }
        self.graph = Some(g);
    }

    /// Execute one statement.
    pub fn statement(&mut self, st: &Statement) -> Result<Option<Output>, ExecError> {
        let arg = st.arg_span.unwrap_or(st.span);
        self.exec(&st.kind).map_err(|kind| {
            let span = match &kind {
                ExecErrorKind::Pivot(PivotError::Graph(GraphError::UnknownNodeClass { .. }))
                | ExecErrorKind::Pivot(PivotError::UnknownFilter(_))
                | ExecErrorKind::Pivot(PivotError::UnknownLabel(_))
                | ExecErrorKind::Pivot(PivotError::KindMismatch { .. })
                | ExecErrorKind::Adapt(AdaptError::UnknownProposal(_))
                | ExecErrorKind::Io { .. } => arg,
                _ => st.span,
            };
            ExecError { span, kind }
        })
    }

    fn exec(&mut self, kind: &StmtKind) -> Result<Option<Output>, ExecErrorKind> {
        match kind {
            StmtKind::Load { path, format } => {
                let full = self.resolve(path);
                let fmt = match format {
                    Some(f) => f.parse::<GraphFormat>()?,
                    None => GraphFormat::from_path(path),
                };
                let text = std::fs::read_to_string(&full).map_err(|e| ExecErrorKind::Io {
                    path: full.display().to_string(),
                    message: e.to_string(),
                })?;
                let g = Arc::new(load_graph(&text, fmt)?);
                self.session = Some(Session::new(Arc::clone(&g)));
                self.graph = Some(g);
                self.group = None;
                Ok(None)
            }
            StmtKind::Select { class, predicates } => {
                self.session_mut()?.select_seed(class, predicates.clone())?;
                Ok(None)
            }
            StmtKind::Pivot { class, via, mode } => {
                self.session_mut()?.pivot(
                    class,
                    via.as_deref(),
                    Direction::Any,
                    mode.unwrap_or_default(),
                )?;
                Ok(None)
            }
            StmtKind::Filter { predicates } => {
                self.session_mut()?.apply_filter(predicates.clone())?;
                Ok(None)
            }
            StmtKind::Group { key, order, bins } => {
                let sort = match order {
                    None => HistogramSort::default(),
                    Some(o) => HistogramSort {
                        key: SortKey::Count,
                        descending: *o == SortOrder::Desc,
                    },
                };
                let binning = match bins {
                    Some(n) => Binning::EqualWidth { bins: *n },
                    None => Binning::Categorical,
                };
                let view = self.session_mut()?.group_by(key, sort, binning)?;
                self.group = Some((key.clone(), binning));
                Ok(Some(Output::Histogram(view)))
            }
            StmtKind::Bins { labels } => {
                let (key, binning) = self.group.clone().ok_or(ExecErrorKind::NoGroup)?;
                self.session_mut()?.select_bins(&key, binning, labels)?;
                Ok(None)
            }
            StmtKind::Snip { filter } => {
                self.session_mut()?
                    .snip_filter(crate::pivot::FilterId(*filter))?;
                Ok(None)
            }
            StmtKind::Scope { on } => {
                self.session_mut()?.set_global_scope(*on);
                Ok(None)
            }
            StmtKind::Undo => {
                self.session_mut()?.undo()?;
                Ok(None)
            }
            StmtKind::Clear => {
                self.record_chain();
                self.session = self.graph.clone().map(Session::new);
                self.group = None;
                Ok(None)
            }
            StmtKind::Describe => Ok(Some(Output::Description(
                self.session_mut()?.describe_chain(),
            ))),
            StmtKind::Export { path, format } => {
                let fmt = match format {
                    Some(f) => f.parse::<GraphFormat>()?,
                    None => GraphFormat::from_path(path),
                };
                let session = self.session_mut()?;
                let x = session.current_subgraph()?;
                let doc = export_subgraph(session.graph(), &x, fmt)?;
                let full = self.resolve(path);
                std::fs::write(&full, doc).map_err(|e| ExecErrorKind::Io {
                    path: full.display().to_string(),
                    message: e.to_string(),
                })?;
                self.record_chain();
                Ok(Some(Output::Exported {
                    path: full.display().to_string(),
                    format: fmt,
                    nodes: x.node_ids.len(),
                    edges: x.edge_ids.len(),
                }))
            }
            StmtKind::AdaptReport => {
                self.proposals = detect_patterns(&self.usage, &self.config)?;
                Ok(Some(Output::Proposals {
                    proposals: self.proposals.clone(),
                }))
            }
            StmtKind::AdaptApply { proposal } => {
                if self.proposals.is_empty() {
                    self.proposals = detect_patterns(&self.usage, &self.config)?;
                }
                let p = self
                    .proposals
                    .iter()
                    .find(|p| p.id == *proposal)
                    .ok_or(AdaptError::UnknownProposal(*proposal))?;
                let g = self.graph.clone().ok_or(ExecErrorKind::NoGraph)?;
                let next = apply_rewrite(&g, &p.rewrite)?;
                let report = equivalence_report(&g, &next, &p.rewrite)?;
                let version = next.version();
                self.graph = Some(Arc::new(next));
                Ok(Some(Output::Applied {
                    proposal: *proposal,
                    graph_version: version,
                    report,
                }))
            }
        }
    }
}

/// Run `script` on a fresh session over `graph`.
pub fn execute(
    script: &Script,
    graph: Arc<PropertyGraph>,
) -> Result<(Session, Vec<Output>), ExecError> {
    let mut ex = Executor::new(Some(graph));
    let outputs = ex.run(script)?;
    let session = match ex.session {
        Some(s) => s,
        None => Session::new(ex.graph.expect("graph was given")),
    };
    Ok((session, outputs))
}
