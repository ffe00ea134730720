use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AdaptError, PatternSignature};
use crate::pivot::{Predicate, Session};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageEntry {
    pub seq: u64,
    pub session: String,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    pub signature: PatternSignature,
}

/// Append-only record of chain signatures.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UsageLog {
    entries: Vec<UsageEntry>,
    next_seq: u64,
}

impl UsageLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[UsageEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn append(
        &mut self,
        session: impl Into<String>,
        timestamp: u64,
        signature: PatternSignature,
    ) -> &UsageEntry {
        self.entries.push(UsageEntry {
            seq: self.next_seq,
            session: session.into(),
            timestamp,
            signature,
        });
        self.next_seq += 1;
        self.entries.last().unwrap()
    }

    /// Append every signature of `chain`; returns the new entries.
    pub fn record_chain(
        &mut self,
        session: &str,
        timestamp: u64,
        chain: &Session,
    ) -> &[UsageEntry] {
        let start = self.entries.len();
        for sig in chain_signatures(chain) {
            self.append(session, timestamp, sig);
        }
        &self.entries[start..]
    }

    /// Parse newline-delimited JSON entries; blank lines are skipped.
    pub fn from_ndjson(text: &str) -> Result<Self, AdaptError> {
        let mut log = UsageLog::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: UsageEntry = serde_json::from_str(line).map_err(|e| AdaptError::Log {
                line: i + 1,
                message: e.to_string(),
            })?;
            log.next_seq = log.next_seq.max(entry.seq + 1);
            log.entries.push(entry);
        }
        Ok(log)
    }

    pub fn to_ndjson(&self) -> String {
        Self::lines(&self.entries)
    }

    /// NDJSON text for a slice of entries, one per line.
    pub fn lines(entries: &[UsageEntry]) -> String {
        let mut out = String::new();
        for e in entries {
            out.push_str(&serde_json::to_string(e).expect("entries serialize"));
            out.push('\n');
        }
        out
    }
}

/// Normalized usage patterns of a chain: every round trip
/// `X → π → Y → reverse(π) → X` with nonempty `π`, and every pair of
/// classes filtered on the same attribute key (in order of appearance).
pub fn chain_signatures(chain: &Session) -> Vec<PatternSignature> {
    let steps = chain.steps();
    let cats: Vec<&str> = steps.iter().map(|s| s.category.as_str()).collect();
    let filtered: Vec<bool> = steps
        .iter()
        .map(|s| s.direct_filters.iter().any(|f| f.active))
        .collect();

    let mut out = Vec::new();
    for i in 0..cats.len() {
        for j in ((i + 4)..cats.len()).step_by(2) {
            let half = (j - i) / 2;
            if (0..=half).all(|t| cats[i + t] == cats[j - t]) {
                let mid = i + half;
                out.push(PatternSignature::Connection {
                    start: cats[i].to_string(),
                    via: cats[i + 1..mid].iter().map(|c| c.to_string()).collect(),
                    end: cats[mid].to_string(),
                    filtered_at_end: filtered[mid],
                });
            }
        }
    }

    let mut keyed: Vec<(&str, &str)> = Vec::new();
    for s in steps {
        for f in s.direct_filters.iter().filter(|f| f.active) {
            let key = match &f.predicate {
                Predicate::Attribute(p) => p.key.as_str(),
                Predicate::Bins(b) => b.key.as_str(),
                Predicate::Degree(_) => continue,
            };
            if !keyed.contains(&(s.category.as_str(), key)) {
                keyed.push((s.category.as_str(), key));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for (a, &(class_x, key)) in keyed.iter().enumerate() {
        for &(class_y, other) in &keyed[a + 1..] {
            if other == key && class_y != class_x && seen.insert((class_x, class_y, key)) {
                out.push(PatternSignature::AttributeCorrelation {
                    class_x: class_x.to_string(),
                    class_y: class_y.to_string(),
                    key: key.to_string(),
                });
            }
        }
    }
    out
}
