use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PivotError;
use crate::graph::{AttrValue, Direction, Node, NodeIx, NodeSet, PropertyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterId(pub u32);

impl fmt::Display for FilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "contains")]
    Contains,
    #[serde(rename = "in")]
    In,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Contains => "contains",
            CompareOp::In => "in",
        }
    }

    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            CompareOp::Lt | CompareOp::Le | CompareOp::Gt | CompareOp::Ge
        )
    }

    fn accepts(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
            CompareOp::Contains | CompareOp::In => false,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Right-hand side of an attribute predicate. Lists only go with `in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    List(Vec<AttrValue>),
    Value(AttrValue),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn one(v: &AttrValue, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match v {
                AttrValue::Text(s) => write!(f, "{s:?}"),
                other => write!(f, "{other}"),
            }
        }
        match self {
            Literal::Value(v) => one(v, f),
            Literal::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    one(v, f)?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttrPredicate {
    pub key: String,
    pub op: CompareOp,
    pub value: Literal,
}

/// Number of incident edges inside the step's seed-and-neighbor subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreePredicate {
    #[serde(default)]
    pub direction: Direction,
    pub op: CompareOp,
    pub value: i64,
}

/// One histogram bin, frozen at selection time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bin", rename_all = "snake_case")]
pub enum BinDef {
    Value { value: AttrValue },
    /// Key absent (categorical grouping).
    Missing,
    /// Key absent or not numeric (equal-width grouping).
    NonNumeric,
    Range { lo: f64, hi: f64, closed: bool },
}

impl BinDef {
    pub fn contains(&self, value: Option<&AttrValue>) -> bool {
        match self {
            BinDef::Value { value: v } => value == Some(v),
            BinDef::Missing => value.is_none(),
            BinDef::NonNumeric => value.is_none_or(|v| !v.is_numeric()),
            BinDef::Range { lo, hi, closed } => match value.and_then(AttrValue::as_f64) {
                Some(x) => x >= *lo && (x < *hi || (*closed && x <= *hi)),
                None => false,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSelection {
    pub key: String,
    pub labels: Vec<String>,
    pub bins: Vec<BinDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    Attribute(AttrPredicate),
    Degree(DegreePredicate),
    Bins(BinSelection),
}

impl Predicate {
    pub fn attr(key: impl Into<String>, op: CompareOp, value: impl Into<AttrValue>) -> Self {
        Predicate::Attribute(AttrPredicate {
            key: key.into(),
            op,
            value: Literal::Value(value.into()),
        })
    }

    pub fn attr_in(key: impl Into<String>, values: Vec<AttrValue>) -> Self {
        Predicate::Attribute(AttrPredicate {
            key: key.into(),
            op: CompareOp::In,
            value: Literal::List(values),
        })
    }

    pub fn degree(direction: Direction, op: CompareOp, value: i64) -> Self {
        Predicate::Degree(DegreePredicate {
            direction,
            op,
            value,
        })
    }

    /// Attribute key the predicate reads, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            Predicate::Attribute(p) => Some(&p.key),
            Predicate::Bins(b) => Some(&b.key),
            Predicate::Degree(_) => None,
        }
    }

    /// Reject operator/literal pairs that can never be evaluated.
    pub fn validate(&self) -> Result<(), PivotError> {
        let mismatch = |reason: &str| {
            Err(PivotError::KindMismatch {
                predicate: self.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            Predicate::Attribute(p) => match (&p.op, &p.value) {
                (CompareOp::In, Literal::List(_)) => Ok(()),
                (CompareOp::In, Literal::Value(_)) => mismatch("`in` needs a list literal"),
                (_, Literal::List(_)) => mismatch("list literals are only valid with `in`"),
                (CompareOp::Contains, Literal::Value(AttrValue::Text(_))) => Ok(()),
                (CompareOp::Contains, _) => mismatch("`contains` needs a text literal"),
                (op, Literal::Value(v)) if op.is_ordering() && !v.is_numeric() => {
                    mismatch("ordering comparisons need a numeric literal")
                }
                _ => Ok(()),
            },
            Predicate::Degree(d) => match d.op {
                CompareOp::Contains | CompareOp::In => {
                    mismatch("degree predicates take comparison operators only")
                }
                _ => Ok(()),
            },
            Predicate::Bins(b) if b.bins.is_empty() && !b.labels.is_empty() => {
                mismatch("bin selection without bin definitions")
            }
            Predicate::Bins(_) => Ok(()),
        }
    }

    /// Evaluate against one node. Degree predicates count incidences whose
    /// other endpoint lies in `subgraph`.
    pub fn matches(&self, g: &PropertyGraph, node: NodeIx, subgraph: &NodeSet) -> bool {
        match self {
            Predicate::Attribute(p) => p.matches(g.node(node)),
            Predicate::Bins(b) => {
                let value = g.node(node).attrs.get(&b.key);
                b.bins.iter().any(|def| def.contains(value))
            }
            Predicate::Degree(d) => {
                let degree = g
                    .incidences(node)
                    .iter()
                    .filter(|a| a.incidence.matches(d.direction) && subgraph.contains(&a.other))
                    .count() as i64;
                d.op.accepts(degree.cmp(&d.value))
            }
        }
    }
}

impl AttrPredicate {
    /// Missing keys fail every operator except `!=`.
    pub fn matches(&self, node: &Node) -> bool {
        let Some(actual) = node.attrs.get(&self.key) else {
            return self.op == CompareOp::Ne;
        };
        match (&self.op, &self.value) {
            (CompareOp::In, Literal::List(items)) => items.contains(actual),
            (CompareOp::Contains, Literal::Value(AttrValue::Text(needle))) => actual
                .as_str()
                .is_some_and(|hay| hay.contains(needle.as_str())),
            (CompareOp::Eq, Literal::Value(v)) => actual == v,
            (CompareOp::Ne, Literal::Value(v)) => actual != v,
            (op, Literal::Value(v)) if op.is_ordering() => {
                if actual.is_null() {
                    return false;
                }
                actual
                    .partial_cmp_same_kind(v)
                    .is_some_and(|ord| op.accepts(ord))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Attribute(p) => write!(f, "{} {} {}", p.key, p.op, p.value),
            Predicate::Degree(d) => {
                let dir = match d.direction {
                    Direction::Any => "any",
                    Direction::Outgoing => "out",
                    Direction::Incoming => "in",
                };
                write!(f, "degree {dir} {} {}", d.op, d.value)
            }
            Predicate::Bins(b) => write!(f, "{} bins {:?}", b.key, b.labels),
        }
    }
}

/// A direct filter attached to a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub id: FilterId,
    pub predicate: Predicate,
    pub applied_at_step: usize,
    pub active: bool,
}
