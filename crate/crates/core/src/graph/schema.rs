use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{PropertyGraph, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directedness {
    Directed,
    Undirected,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeClassSummary {
    pub name: String,
    pub count: usize,
    pub attributes: BTreeMap<String, BTreeSet<ValueKind>>,
    pub derived: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassSummary {
    pub name: String,
    pub count: usize,
    pub directedness: Directedness,
    pub derived: bool,
}

/// Edge count between two node classes over one edge class. Directed edges
/// keep their orientation; undirected edges are keyed with the class names
/// in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionEntry {
    pub source: String,
    pub edge: String,
    pub target: String,
    pub count: usize,
}

/// A connection seen from one node class, used for "where can I pivot next".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassConnection {
    pub edge: String,
    pub class: String,
    pub reverse: bool,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaSummary {
    pub version: u64,
    pub node_classes: Vec<NodeClassSummary>,
    pub edge_classes: Vec<EdgeClassSummary>,
    pub connectivity: Vec<ConnectionEntry>,
}

impl SchemaSummary {
    pub(super) fn of(g: &PropertyGraph) -> SchemaSummary {
        let mut nodes: BTreeMap<&str, NodeClassSummary> = BTreeMap::new();
        for node in g.nodes() {
            let entry = nodes
                .entry(node.class.as_str())
                .or_insert_with(|| NodeClassSummary {
                    name: node.class.clone(),
                    count: 0,
                    attributes: BTreeMap::new(),
                    derived: g.derived_node_classes().contains(&node.class),
                });
            entry.count += 1;
            for (key, value) in &node.attrs {
                entry
                    .attributes
                    .entry(key.clone())
                    .or_default()
                    .insert(value.kind());
            }
        }

        let mut edges: BTreeMap<&str, (usize, bool, bool)> = BTreeMap::new();
        let mut connectivity: BTreeMap<(&str, &str, &str), usize> = BTreeMap::new();
        for (ix, edge) in g.edge_ids().zip(g.edges()) {
            let e = edges.entry(edge.class.as_str()).or_insert((0, false, false));
            e.0 += 1;
            if edge.directed {
                e.1 = true;
            } else {
                e.2 = true;
            }
            let (s, t) = g.endpoints(ix);
            let (mut a, mut b) = (g.node(s).class.as_str(), g.node(t).class.as_str());
            if !edge.directed && b < a {
                std::mem::swap(&mut a, &mut b);
            }
            *connectivity.entry((a, edge.class.as_str(), b)).or_default() += 1;
        }

        SchemaSummary {
            version: g.version(),
            node_classes: nodes.into_values().collect(),
            edge_classes: edges
                .into_iter()
                .map(|(name, (count, directed, undirected))| EdgeClassSummary {
                    name: name.to_string(),
                    count,
                    directedness: match (directed, undirected) {
                        (true, false) => Directedness::Directed,
                        (false, true) => Directedness::Undirected,
                        _ => Directedness::Mixed,
                    },
                    derived: g.derived_edge_classes().contains(name),
                })
                .collect(),
            connectivity: connectivity
                .into_iter()
                .map(|((s, e, t), count)| ConnectionEntry {
                    source: s.to_string(),
                    edge: e.to_string(),
                    target: t.to_string(),
                    count,
                })
                .collect(),
        }
    }

    pub fn node_class(&self, name: &str) -> Option<&NodeClassSummary> {
        self.node_classes.iter().find(|c| c.name == name)
    }

    pub fn edge_class(&self, name: &str) -> Option<&EdgeClassSummary> {
        self.edge_classes.iter().find(|c| c.name == name)
    }

    pub fn connection_count(&self, source: &str, edge: &str, target: &str) -> usize {
        self.connectivity
            .iter()
            .find(|c| c.source == source && c.edge == edge && c.target == target)
            .map_or(0, |c| c.count)
    }

    /// Every class reachable in one pivot from `class`, with edge counts.
    pub fn connections_from(&self, class: &str) -> Vec<ClassConnection> {
        let mut out = Vec::new();
        for c in &self.connectivity {
            if c.source == class {
                out.push(ClassConnection {
                    edge: c.edge.clone(),
                    class: c.target.clone(),
                    reverse: false,
                    count: c.count,
                });
            }
            if c.target == class && c.source != class {
                out.push(ClassConnection {
                    edge: c.edge.clone(),
                    class: c.source.clone(),
                    reverse: true,
                    count: c.count,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::{Edge, GraphBuilder, Node, PropertyGraph};

    #[test]
    fn empty_graph_has_empty_summary() {
        let s = PropertyGraph::empty().schema_summary();
        assert!(s.node_classes.is_empty());
        assert!(s.edge_classes.is_empty());
        assert!(s.connectivity.is_empty());
    }

    #[test]
    fn counts_sum_to_totals_and_reverse_connections_are_listed() {
        let mut b = GraphBuilder::new();
        b.node(Node::new("p1", "Player").with_attr("position", "QB"))
            .node(Node::new("p2", "Player").with_attr("number", 7i64))
            .node(Node::new("t", "Team"))
            .edge(Edge::directed("e1", "p1", "t", "playsFor"))
            .edge(Edge::directed("e2", "p2", "t", "playsFor"));
        let g = b.build().unwrap();
        let s = g.schema_summary();
        let total: usize = s.node_classes.iter().map(|c| c.count).sum();
        assert_eq!(total, 3);
        let total: usize = s.connectivity.iter().map(|c| c.count).sum();
        assert_eq!(total, 2);
        assert_eq!(s.connection_count("Player", "playsFor", "Team"), 2);
        let from_team = s.connections_from("Team");
        assert_eq!(from_team.len(), 1);
        assert!(from_team[0].reverse);
        assert_eq!(from_team[0].class, "Player");
        let player = s.node_class("Player").unwrap();
        assert_eq!(player.attributes.len(), 2);
    }
}
