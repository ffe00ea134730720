//! Pivot sessions: chained categorical pivots, direct filters, histograms,
//! filter scope, undo and replay.

mod describe;
mod filter;
mod histogram;
mod session;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

pub use describe::{ChainDescription, FilterView, SessionView, StepDescription, StepView};
pub use filter::{
    AttrPredicate, BinDef, BinSelection, CompareOp, DegreePredicate, FilterId, FilterSpec,
    Literal, Predicate,
};
pub use histogram::{histogram, Bin, Binning, HistogramSort, HistogramView, SortKey, MISSING_LABEL};
pub use session::{Operation, PivotStep, Session, StepWarning};

/// How a pivot treats direct filters from an earlier visit of its category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PivotMode {
    /// All matching neighbors; earlier filters on the category are not re-applied.
    #[serde(rename = "fanout")]
    FanOut,
    /// Re-apply the direct filters of the most recent visit of the category.
    #[serde(rename = "fanin")]
    FanIn,
    /// Keep only members of the most recent visit's active set.
    #[serde(rename = "intersect")]
    IntersectPrior,
    /// FanIn while the global scope is on, FanOut otherwise.
    #[default]
    #[serde(rename = "scope")]
    ScopeDefault,
    /// Let the ambiguity heuristic decide.
    #[serde(rename = "smart")]
    Smart,
}

impl PivotMode {
    pub fn keyword(self) -> &'static str {
        match self {
            PivotMode::FanOut => "fanout",
            PivotMode::FanIn => "fanin",
            PivotMode::IntersectPrior => "intersect",
            PivotMode::ScopeDefault => "scope",
            PivotMode::Smart => "smart",
        }
    }
}

impl fmt::Display for PivotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for PivotMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fanout" | "fan-out" | "fan_out" => Ok(PivotMode::FanOut),
            "fanin" | "fan-in" | "fan_in" => Ok(PivotMode::FanIn),
            "intersect" | "intersect-prior" | "intersect_prior" => Ok(PivotMode::IntersectPrior),
            "scope" | "scope-default" | "scope_default" => Ok(PivotMode::ScopeDefault),
            "smart" => Ok(PivotMode::Smart),
            _ => Err(format!("unknown pivot mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PivotError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("the chain is empty; select seeds first")]
    EmptyChain,
    #[error("the chain already has steps; clear it before selecting new seeds")]
    SessionNotEmpty,
    #[error("class `{0}` has not been visited earlier in this chain")]
    NoPriorVisit(String),
    #[error("`{predicate}`: {reason}")]
    KindMismatch { predicate: String, reason: String },
    #[error("a filter needs at least one predicate")]
    EmptyFilter,
    #[error("no filter with id {0}")]
    UnknownFilter(FilterId),
    #[error("no bin labelled {0:?}")]
    UnknownLabel(String),
    #[error("nothing to undo")]
    EmptyLog,
    #[error("invalid binning: {0}")]
    InvalidBinning(String),
}

impl PivotError {
    pub fn code(&self) -> &'static str {
        match self {
            PivotError::Graph(e) => e.code(),
            PivotError::EmptyChain => "empty_chain",
            PivotError::SessionNotEmpty => "session_not_empty",
            PivotError::NoPriorVisit(_) => "no_prior_visit",
            PivotError::KindMismatch { .. } => "kind_mismatch",
            PivotError::EmptyFilter => "empty_filter",
            PivotError::UnknownFilter(_) => "unknown_filter",
            PivotError::UnknownLabel(_) => "unknown_label",
            PivotError::EmptyLog => "empty_log",
            PivotError::InvalidBinning(_) => "invalid_binning",
        }
    }
}
