use std::fmt;

use serde::{Deserialize, Serialize};

use super::filter::{FilterId, Predicate};
use super::session::{Operation, Session, StepWarning};
use super::PivotMode;
use crate::ambiguity::HeuristicDecision;
use crate::graph::Direction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterView {
    pub id: FilterId,
    pub predicate: Predicate,
    pub text: String,
    pub applied_at_step: usize,
    pub active: bool,
    /// Active and the global scope is on.
    pub effective: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepView {
    pub index: usize,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_class: Option<String>,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<PivotMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_mode: Option<PivotMode>,
    pub base_set: Vec<String>,
    pub active_set: Vec<String>,
    pub direct_filters: Vec<FilterView>,
    pub carried_filters: Vec<FilterId>,
    pub witnessed_edges: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<HeuristicDecision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<StepWarning>,
}

/// JSON form of a session: sets as sorted node/edge ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub graph_version: u64,
    pub global_scope: bool,
    pub steps: Vec<StepView>,
    pub log: Vec<Operation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDescription {
    pub index: usize,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<PivotMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_mode: Option<PivotMode>,
    /// (id, text, effective) for each direct filter.
    pub filters: Vec<(FilterId, String, bool)>,
    pub carried: Vec<FilterId>,
    pub size: usize,
    pub base_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<StepWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChainDescription {
    pub global_scope: bool,
    pub entries: Vec<StepDescription>,
}

impl Session {
    pub fn view(&self) -> SessionView {
        let g = self.graph();
        SessionView {
            graph_version: g.version(),
            global_scope: self.global_scope(),
            steps: self
                .steps()
                .iter()
                .map(|s| StepView {
                    index: s.index,
                    category: s.category.clone(),
                    edge_class: s.edge_class.clone(),
                    direction: s.direction,
                    mode: s.mode,
                    resolved_mode: s.resolved,
                    base_set: g.node_id_list(&s.base_set),
                    active_set: g.node_id_list(&s.active_set),
                    direct_filters: s
                        .direct_filters
                        .iter()
                        .map(|f| FilterView {
                            id: f.id,
                            predicate: f.predicate.clone(),
                            text: f.predicate.to_string(),
                            applied_at_step: f.applied_at_step,
                            active: f.active,
                            effective: self.is_effective(f),
                        })
                        .collect(),
                    carried_filters: s.carried_filters.clone(),
                    witnessed_edges: g.edge_id_list(&s.witnessed_edges),
                    decision: s.decision,
                    warning: s.warning,
                })
                .collect(),
            log: self.log().to_vec(),
        }
    }

    pub fn describe_chain(&self) -> ChainDescription {
        ChainDescription {
            global_scope: self.global_scope(),
            entries: self
                .steps()
                .iter()
                .map(|s| StepDescription {
                    index: s.index,
                    category: s.category.clone(),
                    via: s.edge_class.clone(),
                    mode: s.mode,
                    resolved_mode: s.resolved,
                    filters: s
                        .direct_filters
                        .iter()
                        .map(|f| (f.id, f.predicate.to_string(), self.is_effective(f)))
                        .collect(),
                    carried: s.carried_filters.clone(),
                    size: s.active_set.len(),
                    base_size: s.base_set.len(),
                    warning: s.warning,
                })
                .collect(),
        }
    }
}

impl fmt::Display for StepDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.category)?;
        let filters: Vec<String> = self
            .filters
            .iter()
            .map(|(id, text, on)| {
                if *on {
                    format!("#{id} {text}")
                } else {
                    format!("#{id} {text} (off)")
                }
            })
            .collect();
        if !filters.is_empty() {
            write!(f, " ({})", filters.join("; "))?;
        }
        if let Some(mode) = self.resolved_mode {
            write!(f, " [{mode}")?;
            if self.mode.is_some_and(|m| m != mode) {
                write!(f, " via {}", self.mode.unwrap())?;
            }
            f.write_str("]")?;
        }
        write!(f, " {}", self.size)?;
        match self.warning {
            Some(StepWarning::EmptySeeds) => f.write_str(" !empty-seeds"),
            Some(StepWarning::EmptyResult) => f.write_str(" !empty"),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ChainDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" → ")?;
            }
            write!(f, "{e}")?;
        }
        if !self.global_scope {
            f.write_str(" (scope off)")?;
        }
        Ok(())
    }
}
