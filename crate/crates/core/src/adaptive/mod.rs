//! Usage-driven schema rewrites.
//!
//! Finished chains are reduced to [`PatternSignature`]s and appended to a
//! [`UsageLog`]. Signatures seen at least `threshold` times become
//! [`AdaptationProposal`]s, each licensing one additive rewrite of the graph:
//! direct edges for a frequently walked round trip, or value nodes for an
//! attribute repeatedly used to relate two classes.

mod equivalence;
mod log;
mod rewrite;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, PropertyGraph};

pub use equivalence::{equivalence_report, Counterexample, EquivalenceReport};
pub use log::{chain_signatures, UsageEntry, UsageLog};
pub use rewrite::{apply_rewrite, materialize_connection, promote_attribute};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternSignature {
    /// `start → via → end → reverse(via) → start`.
    Connection {
        start: String,
        via: Vec<String>,
        end: String,
        filtered_at_end: bool,
    },
    /// Two classes filtered on the same attribute key in one chain.
    AttributeCorrelation {
        class_x: String,
        class_y: String,
        key: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Rewrite {
    DeriveEdges {
        new_edge_class: String,
        start: String,
        via: Vec<String>,
        end: String,
    },
    PromoteAttribute {
        new_node_class: String,
        new_edge_class: String,
        key: String,
        affected_classes: Vec<String>,
    },
}

impl Rewrite {
    /// The rewrite a signature licenses, with generated class names.
    pub fn for_signature(signature: &PatternSignature) -> Rewrite {
        match signature {
            PatternSignature::Connection {
                start, via, end, ..
            } => Rewrite::DeriveEdges {
                new_edge_class: format!("derived:{start}-{}-{end}", via.join("-")),
                start: start.clone(),
                via: via.clone(),
                end: end.clone(),
            },
            PatternSignature::AttributeCorrelation {
                class_x,
                class_y,
                key,
            } => {
                let mut chars = key.chars();
                let class = match chars.next() {
                    Some(c) => c.to_uppercase().chain(chars).collect(),
                    None => String::from("Value"),
                };
                Rewrite::PromoteAttribute {
                    new_node_class: class,
                    new_edge_class: format!("has_{key}"),
                    key: key.clone(),
                    affected_classes: if class_x == class_y {
                        vec![class_x.clone()]
                    } else {
                        vec![class_x.clone(), class_y.clone()]
                    },
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptationProposal {
    pub id: u32,
    pub signature: PatternSignature,
    pub occurrence_count: usize,
    pub threshold: usize,
    /// Sequence number of the first log entry with this signature.
    pub first_seen: u64,
    pub rewrite: Rewrite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub threshold: usize,
    #[serde(default)]
    pub auto_apply: bool,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            threshold: 3,
            auto_apply: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdaptError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("threshold must be at least 1")]
    InvalidThreshold,
    #[error("attribute `{key}` has no non-null value on classes [{}]", classes.join(", "))]
    AttributeAbsent { key: String, classes: Vec<String> },
    #[error("usage log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("no proposal with id {0}")]
    UnknownProposal(u32),
}

impl AdaptError {
    pub fn code(&self) -> &'static str {
        match self {
            AdaptError::Graph(e) => e.code(),
            AdaptError::InvalidThreshold => "invalid_threshold",
            AdaptError::AttributeAbsent { .. } => "attribute_absent",
            AdaptError::Log { .. } => "usage_log",
            AdaptError::UnknownProposal(_) => "unknown_proposal",
        }
    }
}

/// One proposal per signature occurring at least `threshold` times, most
/// frequent first, ties by first appearance. Ids are positions from 1.
pub fn detect_patterns(
    log: &UsageLog,
    config: &AdaptConfig,
) -> Result<Vec<AdaptationProposal>, AdaptError> {
    if config.threshold == 0 {
        return Err(AdaptError::InvalidThreshold);
    }
    let mut tally: HashMap<&PatternSignature, (usize, u64)> = HashMap::new();
    for entry in log.entries() {
        let slot = tally.entry(&entry.signature).or_insert((0, entry.seq));
        slot.0 += 1;
        slot.1 = slot.1.min(entry.seq);
    }
    let mut hits: Vec<(&PatternSignature, usize, u64)> = tally
        .into_iter()
        .filter(|(_, (count, _))| *count >= config.threshold)
        .map(|(sig, (count, first))| (sig, count, first))
        .collect();
    hits.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    Ok(hits
        .into_iter()
        .enumerate()
        .map(|(i, (sig, count, first))| AdaptationProposal {
            id: i as u32 + 1,
            signature: sig.clone(),
            occurrence_count: count,
            threshold: config.threshold,
            first_seen: first,
            rewrite: Rewrite::for_signature(sig),
        })
        .collect())
}

/// Find a proposal by id and apply its rewrite.
pub fn apply_proposal(
    g: &PropertyGraph,
    proposals: &[AdaptationProposal],
    id: u32,
) -> Result<PropertyGraph, AdaptError> {
    let p = proposals
        .iter()
        .find(|p| p.id == id)
        .ok_or(AdaptError::UnknownProposal(id))?;
    apply_rewrite(g, &p.rewrite)
}
