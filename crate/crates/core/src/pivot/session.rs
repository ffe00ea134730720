use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::filter::{BinSelection, FilterId, FilterSpec, Predicate};
use super::histogram::{histogram, Binning, HistogramSort, HistogramView};
use super::{PivotError, PivotMode};
use crate::ambiguity::{self, HeuristicDecision};
use crate::graph::io::{Extraction, Provenance};
use crate::graph::{Direction, EdgeSet, NodeSet, PropertyGraph};

/// One user operation, as recorded in the session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    Select {
        class: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        predicates: Vec<Predicate>,
    },
    Pivot {
        class: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge_class: Option<String>,
        #[serde(default)]
        direction: Direction,
        #[serde(default)]
        mode: PivotMode,
    },
    Filter {
        predicates: Vec<Predicate>,
    },
    Bins {
        selection: BinSelection,
    },
    Snip {
        filter: FilterId,
    },
    Restore {
        filter: FilterId,
    },
    Scope {
        global: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepWarning {
    /// The previous step had no active nodes.
    EmptySeeds,
    /// This step ended up with no active nodes.
    EmptyResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotStep {
    pub index: usize,
    pub category: String,
    pub edge_class: Option<String>,
    pub direction: Direction,
    /// Mode as requested; `None` for the seed step.
    pub mode: Option<PivotMode>,
    /// FanOut, FanIn or IntersectPrior after resolving scope/smart.
    pub resolved: Option<PivotMode>,
    pub base_set: NodeSet,
    /// Base set after the mode's constraint, before this step's own filters.
    pub constrained_set: NodeSet,
    pub active_set: NodeSet,
    pub direct_filters: Vec<FilterSpec>,
    /// Filters re-applied from an earlier visit (FanIn).
    pub carried_filters: Vec<FilterId>,
    pub witnessed_edges: EdgeSet,
    pub decision: Option<HeuristicDecision>,
    pub warning: Option<StepWarning>,
}

/// A pivot chain over one graph snapshot.
///
/// Every mutation is appended to the operation log. Snips, scope changes and
/// undo rebuild the chain by replaying the log from scratch.
#[derive(Clone)]
pub struct Session {
    graph: Arc<PropertyGraph>,
    steps: Vec<PivotStep>,
    global_scope: bool,
    log: Vec<Operation>,
    inactive: BTreeSet<FilterId>,
    next_filter: u32,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("graph_version", &self.graph.version())
            .field("steps", &self.steps.len())
            .field("global_scope", &self.global_scope)
            .field("log", &self.log)
            .finish()
    }
}

impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        self.graph.version() == other.graph.version()
            && self.steps == other.steps
            && self.global_scope == other.global_scope
            && self.log == other.log
    }
}

impl Session {
    pub fn new(graph: Arc<PropertyGraph>) -> Self {
        Session {
            graph,
            steps: Vec::new(),
            global_scope: true,
            log: Vec::new(),
            inactive: BTreeSet::new(),
            next_filter: 1,
        }
    }

    /// Rebuild a session by replaying `log` on `graph`.
    pub fn from_log(graph: Arc<PropertyGraph>, log: Vec<Operation>) -> Result<Self, PivotError> {
        let mut s = Session::new(graph);
        s.log = log;
        s.rebuild()?;
        Ok(s)
    }

    pub fn graph(&self) -> &Arc<PropertyGraph> {
        &self.graph
    }

    pub fn steps(&self) -> &[PivotStep] {
        &self.steps
    }

    pub fn last_step(&self) -> Option<&PivotStep> {
        self.steps.last()
    }

    pub fn global_scope(&self) -> bool {
        self.global_scope
    }

    pub fn log(&self) -> &[Operation] {
        &self.log
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn filter(&self, id: FilterId) -> Option<&FilterSpec> {
        self.filters().find(|f| f.id == id)
    }

    pub fn filters(&self) -> impl Iterator<Item = &FilterSpec> {
        self.steps.iter().flat_map(|s| s.direct_filters.iter())
    }

    /// A filter counts as effective when it is not snipped and the global
    /// scope is on.
    pub fn is_effective(&self, spec: &FilterSpec) -> bool {
        spec.active && self.global_scope
    }

    pub fn select_seed(
        &mut self,
        class: &str,
        predicates: Vec<Predicate>,
    ) -> Result<&PivotStep, PivotError> {
        self.record(Operation::Select {
            class: class.to_string(),
            predicates,
        })?;
        Ok(self.steps.last().unwrap())
    }

    pub fn pivot(
        &mut self,
        class: &str,
        edge_class: Option<&str>,
        direction: Direction,
        mode: PivotMode,
    ) -> Result<&PivotStep, PivotError> {
        self.record(Operation::Pivot {
            class: class.to_string(),
            edge_class: edge_class.map(str::to_string),
            direction,
            mode,
        })?;
        Ok(self.steps.last().unwrap())
    }

    /// Run one operation through the same checks as the dedicated methods.
    pub fn perform(&mut self, op: Operation) -> Result<(), PivotError> {
        match op {
            Operation::Select { class, predicates } => {
                self.select_seed(&class, predicates)?;
            }
            Operation::Pivot {
                class,
                edge_class,
                direction,
                mode,
            } => {
                self.pivot(&class, edge_class.as_deref(), direction, mode)?;
            }
            Operation::Filter { predicates } => {
                self.apply_filter(predicates)?;
            }
            Operation::Bins { selection } => {
                self.record(Operation::Bins { selection })?;
            }
            Operation::Snip { filter } => self.snip_filter(filter)?,
            Operation::Restore { filter } => self.restore_filter(filter)?,
            Operation::Scope { global } => self.set_global_scope(global),
        }
        Ok(())
    }

    /// Attach one or more predicates to the current step as direct filters.
    pub fn apply_filter(&mut self, predicates: Vec<Predicate>) -> Result<&PivotStep, PivotError> {
        self.record(Operation::Filter { predicates })?;
        Ok(self.steps.last().unwrap())
    }

    pub fn group_by(
        &self,
        key: &str,
        sort: HistogramSort,
        binning: Binning,
    ) -> Result<HistogramView, PivotError> {
        let step = self.steps.last().ok_or(PivotError::EmptyChain)?;
        histogram(&self.graph, &step.active_set, key, binning, sort)
    }

    /// Filter the current step down to the chosen bins of a fresh histogram.
    pub fn select_bins(
        &mut self,
        key: &str,
        binning: Binning,
        labels: &[String],
    ) -> Result<&PivotStep, PivotError> {
        let view = self.group_by(key, HistogramSort::default(), binning)?;
        let mut bins = Vec::new();
        for label in labels {
            let bin = view
                .bin(label)
                .ok_or_else(|| PivotError::UnknownLabel(label.clone()))?;
            bins.extend(bin.members.iter().cloned());
        }
        self.record(Operation::Bins {
            selection: BinSelection {
                key: key.to_string(),
                labels: labels.to_vec(),
                bins,
            },
        })?;
        Ok(self.steps.last().unwrap())
    }

    /// Deactivate a filter. Snipping an already inactive filter does nothing.
    pub fn snip_filter(&mut self, id: FilterId) -> Result<(), PivotError> {
        let spec = self.filter(id).ok_or(PivotError::UnknownFilter(id))?;
        if spec.active {
            self.record_and_rebuild(Operation::Snip { filter: id })?;
        }
        Ok(())
    }

    /// Reactivate a snipped filter.
    pub fn restore_filter(&mut self, id: FilterId) -> Result<(), PivotError> {
        let spec = self.filter(id).ok_or(PivotError::UnknownFilter(id))?;
        if !spec.active {
            self.record_and_rebuild(Operation::Restore { filter: id })?;
        }
        Ok(())
    }

    pub fn toggle_global_scope(&mut self) {
        self.set_global_scope(!self.global_scope);
    }

    pub fn set_global_scope(&mut self, on: bool) {
        if on != self.global_scope {
            self.record_and_rebuild(Operation::Scope { global: on })
                .expect("scope changes replay a log that already replayed");
        }
    }

    /// Drop the last operation and replay the rest.
    pub fn undo(&mut self) -> Result<Operation, PivotError> {
        let op = self.log.pop().ok_or(PivotError::EmptyLog)?;
        if let Err(e) = self.rebuild() {
            self.log.push(op);
            self.rebuild()?;
            return Err(e);
        }
        Ok(op)
    }

    pub fn clear(&mut self) {
        *self = Session::new(Arc::clone(&self.graph));
    }

    /// Move the session onto another snapshot and replay its log there.
    pub fn rebase(&mut self, graph: Arc<PropertyGraph>) -> Result<(), PivotError> {
        let previous = std::mem::replace(&mut self.graph, graph);
        if let Err(e) = self.rebuild() {
            self.graph = previous;
            self.rebuild()?;
            return Err(e);
        }
        Ok(())
    }

    /// Union of all active sets plus the witnessed edges among them.
    pub fn current_subgraph(&self) -> Result<Extraction, PivotError> {
        if self.steps.is_empty() {
            return Err(PivotError::EmptyChain);
        }
        let node_ids: NodeSet = self
            .steps
            .iter()
            .flat_map(|s| s.active_set.iter().copied())
            .collect();
        let edge_ids: EdgeSet = self
            .steps
            .iter()
            .flat_map(|s| s.witnessed_edges.iter().copied())
            .filter(|&e| {
                let (a, b) = self.graph.endpoints(e);
                node_ids.contains(&a) && node_ids.contains(&b)
            })
            .collect();
        let provenance = self
            .steps
            .iter()
            .map(|s| Provenance {
                step: s.index,
                category: s.category.clone(),
                size: s.active_set.len(),
            })
            .collect();
        Ok(Extraction {
            node_ids,
            edge_ids,
            provenance,
        })
    }

    fn record(&mut self, op: Operation) -> Result<(), PivotError> {
        self.apply(&op)?;
        self.log.push(op);
        Ok(())
    }

    fn record_and_rebuild(&mut self, op: Operation) -> Result<(), PivotError> {
        self.log.push(op);
        if let Err(e) = self.rebuild() {
            self.log.pop();
            self.rebuild()?;
            return Err(e);
        }
        Ok(())
    }

    fn rebuild(&mut self) -> Result<(), PivotError> {
        let log = std::mem::take(&mut self.log);
        let mut scope = true;
        let mut inactive = BTreeSet::new();
        for op in &log {
            match op {
                Operation::Snip { filter } => {
                    inactive.insert(*filter);
                }
                Operation::Restore { filter } => {
                    inactive.remove(filter);
                }
                Operation::Scope { global } => scope = *global,
                _ => {}
            }
        }
        self.steps.clear();
        self.next_filter = 1;
        self.global_scope = scope;
        self.inactive = inactive;
        let result = log.iter().try_for_each(|op| self.apply(op));
        self.log = log;
        result
    }

    /// Apply one operation to the step list. Leaves the session untouched on
    /// error.
    fn apply(&mut self, op: &Operation) -> Result<(), PivotError> {
        match op {
            Operation::Select { class, predicates } => {
                if !self.steps.is_empty() {
                    return Err(PivotError::SessionNotEmpty);
                }
                let extent: NodeSet = self.graph.class_extent(class)?.iter().copied().collect();
                predicates.iter().try_for_each(Predicate::validate)?;
                self.steps.push(PivotStep {
                    index: 0,
                    category: class.clone(),
                    edge_class: None,
                    direction: Direction::Any,
                    mode: None,
                    resolved: None,
                    constrained_set: extent.clone(),
                    active_set: extent.clone(),
                    base_set: extent,
                    direct_filters: Vec::new(),
                    carried_filters: Vec::new(),
                    witnessed_edges: EdgeSet::new(),
                    decision: None,
                    warning: None,
                });
                self.attach(predicates.clone());
            }
            Operation::Pivot {
                class,
                edge_class,
                direction,
                mode,
            } => {
                let step = self.compute_pivot(class, edge_class.as_deref(), *direction, *mode)?;
                self.steps.push(step);
                self.refresh(self.steps.len() - 1);
            }
            Operation::Filter { predicates } => {
                if self.steps.is_empty() {
                    return Err(PivotError::EmptyChain);
                }
                if predicates.is_empty() {
                    return Err(PivotError::EmptyFilter);
                }
                predicates.iter().try_for_each(Predicate::validate)?;
                self.attach(predicates.clone());
            }
            Operation::Bins { selection } => {
                if self.steps.is_empty() {
                    return Err(PivotError::EmptyChain);
                }
                let predicate = Predicate::Bins(selection.clone());
                predicate.validate()?;
                self.attach(vec![predicate]);
            }
            Operation::Snip { filter } | Operation::Restore { filter } => {
                if self.filter(*filter).is_none() {
                    return Err(PivotError::UnknownFilter(*filter));
                }
            }
            Operation::Scope { .. } => {}
        }
        Ok(())
    }

    /// Append predicates as filters of the last step and recompute it.
    fn attach(&mut self, predicates: Vec<Predicate>) {
        let at = self.steps.len() - 1;
        for predicate in predicates {
            let id = FilterId(self.next_filter);
            self.next_filter += 1;
            let active = !self.inactive.contains(&id);
            self.steps[at].direct_filters.push(FilterSpec {
                id,
                predicate,
                applied_at_step: at,
                active,
            });
        }
        self.refresh(at);
    }

    /// Nodes a degree predicate at step `i` may count edges towards.
    fn subgraph(&self, i: usize) -> NodeSet {
        let step = &self.steps[i];
        match i.checked_sub(1) {
            Some(p) => step
                .base_set
                .union(&self.steps[p].active_set)
                .copied()
                .collect(),
            None => step.base_set.clone(),
        }
    }

    fn satisfying(&self, i: usize, candidates: &NodeSet, predicates: &[&Predicate]) -> NodeSet {
        if predicates.is_empty() {
            return candidates.clone();
        }
        let sub = if predicates.iter().any(|p| matches!(p, Predicate::Degree(_))) {
            self.subgraph(i)
        } else {
            NodeSet::new()
        };
        candidates
            .iter()
            .copied()
            .filter(|&n| predicates.iter().all(|p| p.matches(&self.graph, n, &sub)))
            .collect()
    }

    /// Recompute the active set and warning of step `i` from its
    /// constrained set and own filters.
    fn refresh(&mut self, i: usize) {
        let step = &self.steps[i];
        let own: Vec<&Predicate> = step
            .direct_filters
            .iter()
            .filter(|f| f.active)
            .map(|f| &f.predicate)
            .collect();
        let active = self.satisfying(i, &step.constrained_set, &own);
        let seeds_empty = i > 0 && self.steps[i - 1].active_set.is_empty();
        let step = &mut self.steps[i];
        step.warning = if seeds_empty {
            Some(StepWarning::EmptySeeds)
        } else if active.is_empty() {
            Some(StepWarning::EmptyResult)
        } else {
            None
        };
        step.active_set = active;
    }

    /// Filters a FanIn pivot re-applies when returning to the category of
    /// step `prior`: its effective own filters and whatever it carried.
    fn carry_from(&self, prior: usize) -> Vec<FilterId> {
        if !self.global_scope {
            return Vec::new();
        }
        let step = &self.steps[prior];
        let mut ids: Vec<FilterId> = step
            .direct_filters
            .iter()
            .filter(|f| f.active)
            .map(|f| f.id)
            .collect();
        for &id in &step.carried_filters {
            if self.filter(id).is_some_and(|f| f.active) && !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids
    }

    fn compute_pivot(
        &self,
        class: &str,
        edge_class: Option<&str>,
        direction: Direction,
        mode: PivotMode,
    ) -> Result<PivotStep, PivotError> {
        let prev = self.steps.last().ok_or(PivotError::EmptyChain)?;
        let expansion = self.graph.expand(
            prev.active_set.iter().copied(),
            class,
            edge_class,
            direction,
        )?;
        let (resolved, decision) = match mode {
            PivotMode::Smart => {
                let d = ambiguity::suggest(self, class)?;
                (d.suggested_mode, Some(d))
            }
            PivotMode::ScopeDefault if self.global_scope => (PivotMode::FanIn, None),
            PivotMode::ScopeDefault => (PivotMode::FanOut, None),
            other => (other, None),
        };
        let prior = self.steps.iter().rposition(|s| s.category == class);
        let index = self.steps.len();
        let mut step = PivotStep {
            index,
            category: class.to_string(),
            edge_class: edge_class.map(str::to_string),
            direction,
            mode: Some(mode),
            resolved: Some(resolved),
            constrained_set: NodeSet::new(),
            active_set: NodeSet::new(),
            base_set: expansion.nodes,
            direct_filters: Vec::new(),
            carried_filters: Vec::new(),
            witnessed_edges: expansion.edges,
            decision,
            warning: None,
        };
        step.constrained_set = match resolved {
            PivotMode::IntersectPrior => {
                let p = prior.ok_or_else(|| PivotError::NoPriorVisit(class.to_string()))?;
                step.base_set
                    .intersection(&self.steps[p].active_set)
                    .copied()
                    .collect()
            }
            PivotMode::FanIn => {
                step.carried_filters = prior.map(|p| self.carry_from(p)).unwrap_or_default();
                let predicates: Vec<&Predicate> = step
                    .carried_filters
                    .iter()
                    .filter_map(|&id| self.filter(id))
                    .map(|f| &f.predicate)
                    .collect();
                if predicates.is_empty() {
                    step.base_set.clone()
                } else {
                    let sub: NodeSet = if predicates.iter().any(|p| matches!(p, Predicate::Degree(_)))
                    {
                        step.base_set.union(&prev.active_set).copied().collect()
                    } else {
                        NodeSet::new()
                    };
                    step.base_set
                        .iter()
                        .copied()
                        .filter(|&n| predicates.iter().all(|p| p.matches(&self.graph, n, &sub)))
                        .collect()
                }
            }
            _ => step.base_set.clone(),
        };
        step.active_set = step.constrained_set.clone();
        Ok(step)
    }
}
