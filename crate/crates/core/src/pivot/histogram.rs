use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::filter::BinDef;
use super::PivotError;
use crate::graph::{AttrValue, NodeSet, PropertyGraph};

/// Label of the reserved bin for nodes without a usable value.
pub const MISSING_LABEL: &str = "∅";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Binning {
    #[default]
    Categorical,
    EqualWidth { bins: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    #[default]
    Label,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HistogramSort {
    #[serde(default)]
    pub key: SortKey,
    #[serde(default)]
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub label: String,
    pub count: usize,
    pub selected: bool,
    pub members: Vec<BinDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramView {
    pub attribute_key: String,
    pub binning: Binning,
    pub sort: HistogramSort,
    pub bins: Vec<Bin>,
}

impl HistogramView {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn bin(&self, label: &str) -> Option<&Bin> {
        self.bins.iter().find(|b| b.label == label)
    }
}

struct Draft {
    label: String,
    count: usize,
    members: Vec<BinDef>,
    // natural order: sort value, then reserved bins last
    order: (u8, Option<AttrValue>, f64),
}

/// Group `set` by an attribute. Bins partition the set; every node lacking
/// the key (or, for equal-width bins, a numeric value) lands in `∅`.
pub fn histogram(
    g: &PropertyGraph,
    set: &NodeSet,
    key: &str,
    binning: Binning,
    sort: HistogramSort,
) -> Result<HistogramView, PivotError> {
    let mut drafts: Vec<Draft> = Vec::new();
    match binning {
        Binning::Categorical => {
            let mut missing = 0;
            let mut by_label: HashMap<String, usize> = HashMap::new();
            for &n in set {
                match g.node(n).attrs.get(key) {
                    None => missing += 1,
                    Some(v) => {
                        let label = v.to_string();
                        match by_label.get(&label) {
                            Some(&i) => {
                                let d = &mut drafts[i];
                                d.count += 1;
                                if !d.members.iter().any(|m| m.contains(Some(v))) {
                                    d.members.push(BinDef::Value { value: v.clone() });
                                }
                            }
                            None => {
                                by_label.insert(label.clone(), drafts.len());
                                drafts.push(Draft {
                                    label,
                                    count: 1,
                                    members: vec![BinDef::Value { value: v.clone() }],
                                    order: (0, Some(v.clone()), 0.0),
                                });
                            }
                        }
                    }
                }
            }
            if missing > 0 {
                drafts.push(Draft {
                    label: MISSING_LABEL.to_string(),
                    count: missing,
                    members: vec![BinDef::Missing],
                    order: (1, None, 0.0),
                });
            }
        }
        Binning::EqualWidth { bins } => {
            if bins == 0 {
                return Err(PivotError::InvalidBinning(
                    "equal-width binning needs at least one bin".into(),
                ));
            }
            let values: Vec<Option<f64>> = set
                .iter()
                .map(|&n| g.node(n).attrs.get(key).and_then(AttrValue::as_f64))
                .collect();
            let numeric: Vec<f64> = values.iter().flatten().copied().collect();
            if !numeric.is_empty() {
                let min = numeric.iter().copied().fold(f64::INFINITY, f64::min);
                let max = numeric.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let count = if max > min { bins } else { 1 };
                let width = (max - min) / count as f64;
                let mut edges: Vec<f64> = (0..count).map(|i| min + width * i as f64).collect();
                edges.push(max);
                for i in 0..count {
                    let closed = i + 1 == count;
                    let (lo, hi) = (edges[i], edges[i + 1]);
                    let def = BinDef::Range { lo, hi, closed };
                    let tally = numeric
                        .iter()
                        .filter(|&&x| def.contains(Some(&AttrValue::Real(x))))
                        .count();
                    drafts.push(Draft {
                        label: if closed {
                            format!("[{lo}, {hi}]")
                        } else {
                            format!("[{lo}, {hi})")
                        },
                        count: tally,
                        members: vec![def],
                        order: (0, None, lo),
                    });
                }
            }
            let other = values.iter().filter(|v| v.is_none()).count();
            if other > 0 {
                drafts.push(Draft {
                    label: MISSING_LABEL.to_string(),
                    count: other,
                    members: vec![BinDef::NonNumeric],
                    order: (1, None, 0.0),
                });
            }
        }
    }

    let natural = |a: &Draft, b: &Draft| {
        a.order
            .0
            .cmp(&b.order.0)
            .then_with(|| match (&a.order.1, &b.order.1) {
                (Some(x), Some(y)) => x.display_cmp(y),
                _ => a.order.2.total_cmp(&b.order.2),
            })
            .then_with(|| a.label.cmp(&b.label))
    };
    drafts.sort_by(|a, b| {
        let primary = match sort.key {
            SortKey::Label => natural(a, b),
            SortKey::Count => a.count.cmp(&b.count).then_with(|| natural(a, b)),
        };
        if sort.descending {
            primary.reverse()
        } else {
            primary
        }
    });

    Ok(HistogramView {
        attribute_key: key.to_string(),
        binning,
        sort,
        bins: drafts
            .into_iter()
            .map(|d| Bin {
                label: d.label,
                count: d.count,
                selected: false,
                members: d.members,
            })
            .collect(),
    })
}
