use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::{Attrs, Edge, GraphError, Node, PropertyGraph};

/// Outcome of edge reification.
#[derive(Debug, Clone)]
pub struct Reified {
    pub graph: Arc<PropertyGraph>,
    /// Edge class → node class used for it, when the edge class name was
    /// already taken by a node class.
    pub renames: BTreeMap<String, String>,
    pub reified_edges: usize,
}

/// Replace every attributed edge `u -e- v` with `u - n - v`, where `n` is a
/// new node of the edge's class carrying the edge's attributes. Plain edges
/// stay as they are. A graph without attributed edges is returned unchanged
/// (same snapshot, same version).
pub fn reify_attributed_edges(g: &Arc<PropertyGraph>) -> Result<Reified, GraphError> {
    let attributed = g.edges().iter().filter(|e| !e.attrs.is_empty()).count();
    if attributed == 0 {
        return Ok(Reified {
            graph: Arc::clone(g),
            renames: BTreeMap::new(),
            reified_edges: 0,
        });
    }

    let node_classes: HashSet<&str> = g.node_classes().iter().map(String::as_str).collect();
    let mut renames = BTreeMap::new();
    let mut class_for = |edge_class: &str| -> String {
        if !node_classes.contains(edge_class) {
            return edge_class.to_string();
        }
        renames
            .entry(edge_class.to_string())
            .or_insert_with(|| {
                let mut n = 1;
                loop {
                    let candidate = if n == 1 {
                        format!("{edge_class}_edge")
                    } else {
                        format!("{edge_class}_edge{n}")
                    };
                    if !node_classes.contains(candidate.as_str()) {
                        break candidate;
                    }
                    n += 1;
                }
            })
            .clone()
    };

    let mut node_ids: HashSet<String> = g.nodes().iter().map(|n| n.id.clone()).collect();
    let mut edge_ids: HashSet<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let fresh = |used: &mut HashSet<String>, base: String| -> String {
        let mut candidate = base.clone();
        let mut n = 1;
        while used.contains(&candidate) {
            n += 1;
            candidate = format!("{base}~{n}");
        }
        used.insert(candidate.clone());
        candidate
    };

    let mut builder = g.rewrite();
    let original_edges = std::mem::take(&mut builder.edges);
    let mut kept = Vec::with_capacity(original_edges.len() + attributed);
    let mut new_nodes = Vec::with_capacity(attributed);
    for edge in original_edges {
        if edge.attrs.is_empty() {
            kept.push(edge);
            continue;
        }
        let mid = fresh(&mut node_ids, edge.id.clone());
        new_nodes.push(Node {
            id: mid.clone(),
            class: class_for(&edge.class),
            attrs: edge.attrs.clone(),
        });
        let first = fresh(&mut edge_ids, format!("{}/src", edge.id));
        let second = fresh(&mut edge_ids, format!("{}/dst", edge.id));
        kept.push(Edge {
            id: first,
            source: edge.source.clone(),
            target: mid.clone(),
            class: edge.class.clone(),
            directed: edge.directed,
            attrs: Attrs::new(),
        });
        kept.push(Edge {
            id: second,
            source: mid,
            target: edge.target,
            class: edge.class,
            directed: edge.directed,
            attrs: Attrs::new(),
        });
    }
    for node in new_nodes {
        builder.node(node);
    }
    for edge in kept {
        builder.edge(edge);
    }
    Ok(Reified {
        graph: Arc::new(builder.build()?),
        renames,
        reified_edges: attributed,
    })
}
