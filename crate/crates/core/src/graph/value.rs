use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Attribute map of a node or edge. Ordered so exports and JSON are stable.
pub type Attrs = BTreeMap<String, AttrValue>;

/// A scalar attribute value.
///
/// Values of different kinds never compare as ordered; equality across
/// kinds is always false except `Null == Null`.
#[derive(Debug, Clone)]
pub enum AttrValue {
    Text(String),
    Int(i64),
    Real(f64),
    Bool(bool),
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Text,
    Int,
    Real,
    Bool,
    Null,
}

impl AttrValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            AttrValue::Text(_) => ValueKind::Text,
            AttrValue::Int(_) => ValueKind::Int,
            AttrValue::Real(_) => ValueKind::Real,
            AttrValue::Bool(_) => ValueKind::Bool,
            AttrValue::Null => ValueKind::Null,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, AttrValue::Null)
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, AttrValue::Int(_) | AttrValue::Real(_))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Int(i) => Some(*i as f64),
            AttrValue::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            AttrValue::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Ordering between two values of the same kind. `None` across kinds.
    pub fn partial_cmp_same_kind(&self, other: &AttrValue) -> Option<Ordering> {
        match (self, other) {
            (AttrValue::Text(a), AttrValue::Text(b)) => Some(a.cmp(b)),
            (AttrValue::Int(a), AttrValue::Int(b)) => Some(a.cmp(b)),
            (AttrValue::Real(a), AttrValue::Real(b)) => a.partial_cmp(b),
            (AttrValue::Bool(a), AttrValue::Bool(b)) => Some(a.cmp(b)),
            (AttrValue::Null, AttrValue::Null) => Some(Ordering::Equal),
            _ => None,
        }
    }

    /// Total order used for display sorting only: kind first, then value.
    pub fn display_cmp(&self, other: &AttrValue) -> Ordering {
        self.kind().cmp(&other.kind()).then_with(|| match (self, other) {
            (AttrValue::Real(a), AttrValue::Real(b)) => a.total_cmp(b),
            _ => self.partial_cmp_same_kind(other).unwrap_or(Ordering::Equal),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Option<AttrValue> {
        use serde_json::Value;
        Some(match value {
            Value::Null => AttrValue::Null,
            Value::Bool(b) => AttrValue::Bool(*b),
            Value::String(s) => AttrValue::Text(s.clone()),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    AttrValue::Int(i)
                } else {
                    AttrValue::Real(n.as_f64()?)
                }
            }
            Value::Array(_) | Value::Object(_) => return None,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            AttrValue::Text(s) => Value::String(s.clone()),
            AttrValue::Int(i) => Value::from(*i),
            AttrValue::Real(r) => serde_json::Number::from_f64(*r)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            AttrValue::Bool(b) => Value::Bool(*b),
            AttrValue::Null => Value::Null,
        }
    }
}

impl PartialEq for AttrValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AttrValue::Text(a), AttrValue::Text(b)) => a == b,
            (AttrValue::Int(a), AttrValue::Int(b)) => a == b,
            // bitwise so that values survive set/map round trips
            (AttrValue::Real(a), AttrValue::Real(b)) => a.to_bits() == b.to_bits() || a == b,
            (AttrValue::Bool(a), AttrValue::Bool(b)) => a == b,
            (AttrValue::Null, AttrValue::Null) => true,
            _ => false,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Text(s) => f.write_str(s),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Real(r) => write!(f, "{r:?}"),
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Null => f.write_str("null"),
        }
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Text(s.to_string())
    }
}

impl From<String> for AttrValue {
    fn from(s: String) -> Self {
        AttrValue::Text(s)
    }
}

impl From<i64> for AttrValue {
    fn from(i: i64) -> Self {
        AttrValue::Int(i)
    }
}

impl From<f64> for AttrValue {
    fn from(r: f64) -> Self {
        AttrValue::Real(r)
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

impl Serialize for AttrValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AttrValue::Text(s) => serializer.serialize_str(s),
            AttrValue::Int(i) => serializer.serialize_i64(*i),
            AttrValue::Real(r) => serializer.serialize_f64(*r),
            AttrValue::Bool(b) => serializer.serialize_bool(*b),
            AttrValue::Null => serializer.serialize_unit(),
        }
    }
}

impl<'de> Deserialize<'de> for AttrValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        AttrValue::from_json(&value)
            .ok_or_else(|| serde::de::Error::custom("attribute values must be scalars"))
    }
}
