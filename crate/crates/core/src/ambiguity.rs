//! Ambiguity of a prospective pivot and the smart-pivot suggestion.
//!
//! A pivot is ambiguous only when the chain carries an effective direct
//! filter and the target class was visited before. In that case the
//! suggestion is to fan in when filters were applied after the earlier
//! visit, and to fan out otherwise.

use serde::{Deserialize, Serialize};

use crate::pivot::{FilterId, PivotError, PivotMode, Session};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    PivotsOnly,
    FilteredAcyclic,
    FilteredCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityReport {
    pub target_class: String,
    pub classification: Classification,
    pub prior_visit_step: Option<usize>,
    /// Filters a fan-in would re-apply.
    pub prior_direct_filters: Vec<FilterId>,
    pub intervening_filter_steps: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rationale {
    InterveningFilters,
    NoInterveningFilters,
    NotAmbiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicDecision {
    pub suggested_mode: PivotMode,
    pub rationale: Rationale,
    /// Always true: the caller must offer an override.
    pub reversible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRef {
    pub id: FilterId,
    pub step: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub target_class: String,
    pub classification: Classification,
    pub suggested_mode: PivotMode,
    pub rationale: Rationale,
    pub prior_visit_step: Option<usize>,
    pub reapplied: Vec<FilterRef>,
    pub dropped: Vec<FilterRef>,
    /// Modes the user may pick instead of the suggestion.
    pub alternatives: Vec<PivotMode>,
    pub summary: String,
    pub note: Option<String>,
}

/// Classify a pivot from the end of `session` to `target_class`.
pub fn classify(session: &Session, target_class: &str) -> Result<AmbiguityReport, PivotError> {
    session.graph().check_node_class(target_class)?;
    let steps = session.steps();
    let filtered = |i: usize| {
        steps[i]
            .direct_filters
            .iter()
            .any(|f| session.is_effective(f))
    };
    let any_filter = (0..steps.len()).any(filtered);
    let prior = steps.iter().rposition(|s| s.category == target_class);

    let (prior_direct_filters, intervening) = match prior {
        Some(p) => {
            let step = &steps[p];
            let mut ids: Vec<FilterId> = step
                .direct_filters
                .iter()
                .filter(|f| session.is_effective(f))
                .map(|f| f.id)
                .collect();
            if session.global_scope() {
                for &id in &step.carried_filters {
                    if session.filter(id).is_some_and(|f| f.active) && !ids.contains(&id) {
                        ids.push(id);
                    }
                }
            }
            (ids, ((p + 1)..steps.len()).filter(|&i| filtered(i)).collect())
        }
        None => (Vec::new(), Vec::new()),
    };

    let classification = match (any_filter, prior) {
        (false, _) => Classification::PivotsOnly,
        (true, None) => Classification::FilteredAcyclic,
        (true, Some(_)) => Classification::FilteredCycle,
    };
    Ok(AmbiguityReport {
        target_class: target_class.to_string(),
        classification,
        prior_visit_step: prior,
        prior_direct_filters,
        intervening_filter_steps: intervening,
    })
}

pub fn decide(report: &AmbiguityReport) -> HeuristicDecision {
    let (suggested_mode, rationale) = match report.classification {
        Classification::FilteredCycle if !report.intervening_filter_steps.is_empty() => {
            (PivotMode::FanIn, Rationale::InterveningFilters)
        }
        Classification::FilteredCycle => (PivotMode::FanOut, Rationale::NoInterveningFilters),
        _ => (PivotMode::FanOut, Rationale::NotAmbiguous),
    };
    HeuristicDecision {
        suggested_mode,
        rationale,
        reversible: true,
    }
}

/// Smart-pivot suggestion for a pivot to `target_class`.
pub fn suggest(session: &Session, target_class: &str) -> Result<HeuristicDecision, PivotError> {
    Ok(decide(&classify(session, target_class)?))
}

pub fn explain(
    session: &Session,
    report: &AmbiguityReport,
    decision: &HeuristicDecision,
) -> Explanation {
    let refs: Vec<FilterRef> = report
        .prior_direct_filters
        .iter()
        .filter_map(|&id| session.filter(id))
        .map(|f| FilterRef {
            id: f.id,
            step: f.applied_at_step,
            text: f.predicate.to_string(),
        })
        .collect();
    let (reapplied, dropped) = match (report.classification, decision.suggested_mode) {
        (Classification::FilteredCycle, PivotMode::FanIn) => (refs, Vec::new()),
        (Classification::FilteredCycle, _) => (Vec::new(), refs),
        _ => (Vec::new(), Vec::new()),
    };
    let target = &report.target_class;
    let names = |v: &[FilterRef]| {
        v.iter()
            .map(|r| format!("#{} `{}`", r.id, r.text))
            .collect::<Vec<_>>()
            .join(", ")
    };

    let mut alternatives = Vec::new();
    let mut note = None;
    let summary = match (report.classification, report.prior_visit_step) {
        (Classification::PivotsOnly, _) => {
            format!("no active filters; pivoting to {target} fans out")
        }
        (Classification::FilteredAcyclic, _) => {
            format!("{target} has not been visited; earlier filters stay in effect as connective filters")
        }
        (Classification::FilteredCycle, Some(p)) => {
            alternatives = [PivotMode::FanIn, PivotMode::FanOut, PivotMode::IntersectPrior]
                .into_iter()
                .filter(|&m| m != decision.suggested_mode)
                .collect();
            if report.prior_direct_filters.is_empty() {
                note = Some(format!(
                    "step {p} ({target}) had no direct filters, so fan-in equals fan-out; \
                     use intersect to keep only the {target} nodes active at step {p}"
                ));
            }
            match decision.rationale {
                Rationale::InterveningFilters => format!(
                    "returning to {target} (step {p}) after filters at steps {:?}; fanning in re-applies {}",
                    report.intervening_filter_steps,
                    if reapplied.is_empty() { "nothing".to_string() } else { names(&reapplied) }
                ),
                _ => format!(
                    "returning to {target} (step {p}) with no filters since; fanning out drops {}",
                    if dropped.is_empty() { "nothing".to_string() } else { names(&dropped) }
                ),
            }
        }
        (Classification::FilteredCycle, None) => unreachable!("a cycle has a prior visit"),
    };

    Explanation {
        target_class: target.clone(),
        classification: report.classification,
        suggested_mode: decision.suggested_mode,
        rationale: decision.rationale,
        prior_visit_step: report.prior_visit_step,
        reapplied,
        dropped,
        alternatives,
        summary,
        note,
    }
}
