use serde::{Deserialize, Serialize};

use super::Span;
use crate::pivot::{PivotMode, Predicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stmt", rename_all = "snake_case")]
pub enum StmtKind {
    Load {
        path: String,
        format: Option<String>,
    },
    Select {
        class: String,
        predicates: Vec<Predicate>,
    },
    Pivot {
        class: String,
        via: Option<String>,
        mode: Option<PivotMode>,
    },
    Filter {
        predicates: Vec<Predicate>,
    },
    Group {
        key: String,
        order: Option<SortOrder>,
        bins: Option<usize>,
    },
    Bins {
        labels: Vec<String>,
    },
    Snip {
        filter: u32,
    },
    Scope {
        on: bool,
    },
    Undo,
    Clear,
    Describe,
    Export {
        path: String,
        format: Option<String>,
    },
    AdaptReport,
    AdaptApply {
        proposal: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StmtKind,
    /// From the leading keyword through the terminating `;`.
    pub span: Span,
    /// The statement's main argument (class, key, label list, id or path).
    pub arg_span: Option<Span>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Script {
    pub statements: Vec<Statement>,
}

impl Script {
    /// Statement kinds without source locations, for structural comparison.
    pub fn kinds(&self) -> Vec<&StmtKind> {
        self.statements.iter().map(|s| &s.kind).collect()
    }

    pub fn same_structure(&self, other: &Script) -> bool {
        self.kinds() == other.kinds()
    }
}
