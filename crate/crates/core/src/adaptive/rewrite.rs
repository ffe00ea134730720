use std::collections::{BTreeMap, HashSet};

use super::{AdaptError, Rewrite};
use crate::graph::{AttrValue, Direction, Edge, GraphError, Node, NodeSet, PropertyGraph, ValueKind};

pub fn apply_rewrite(g: &PropertyGraph, rewrite: &Rewrite) -> Result<PropertyGraph, AdaptError> {
    match rewrite {
        Rewrite::DeriveEdges {
            new_edge_class,
            start,
            via,
            end,
        } => materialize_connection(g, new_edge_class, start, via, end),
        Rewrite::PromoteAttribute {
            new_node_class,
            new_edge_class,
            key,
            affected_classes,
        } => promote_attribute(g, new_node_class, new_edge_class, key, affected_classes),
    }
}

fn edge_class_taken(g: &PropertyGraph, class: &str) -> bool {
    g.has_edge_class(class) || g.derived_edge_classes().contains(class)
}

fn node_class_taken(g: &PropertyGraph, class: &str) -> bool {
    g.has_node_class(class) || g.derived_node_classes().contains(class)
}

fn fresh_id(used: &mut HashSet<String>, base: String) -> String {
    let mut candidate = base.clone();
    let mut n = 1;
    while used.contains(&candidate) {
        n += 1;
        candidate = format!("{base}~{n}");
    }
    used.insert(candidate.clone());
    candidate
}

/// Add an undirected `new_edge_class` edge between every `start` node and
/// every `end` node reachable through `via` in order. A via class without
/// instances yields no edges.
pub fn materialize_connection(
    g: &PropertyGraph,
    new_edge_class: &str,
    start: &str,
    via: &[String],
    end: &str,
) -> Result<PropertyGraph, AdaptError> {
    g.check_node_class(start)?;
    g.check_node_class(end)?;
    if edge_class_taken(g, new_edge_class) {
        return Err(GraphError::ClassCollision(new_edge_class.to_string()).into());
    }

    let mut pairs = Vec::new();
    for &x in g.class_extent(start)? {
        let mut frontier: NodeSet = [x].into_iter().collect();
        for class in via {
            if !g.has_node_class(class) {
                frontier.clear();
                break;
            }
            frontier = g.neighbors(frontier, class, None, Direction::Any)?;
        }
        for y in g.neighbors(frontier, end, None, Direction::Any)? {
            pairs.push((x, y));
        }
    }

    let mut used: HashSet<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let mut b = g.rewrite();
    b.mark_derived_edge_class(new_edge_class);
    let mut seen = HashSet::new();
    for (x, y) in pairs {
        // X == Y gives each unordered pair twice
        if !seen.insert((x.min(y), x.max(y))) {
            continue;
        }
        let (sx, sy) = (&g.node(x).id, &g.node(y).id);
        let id = fresh_id(&mut used, format!("{new_edge_class}:{sx}:{sy}"));
        b.edge(Edge::undirected(id, sx.as_str(), sy.as_str(), new_edge_class));
    }
    Ok(b.build()?)
}

/// Add one `new_node_class` node per distinct non-null value of `key` on
/// the affected classes and link every bearer to its value node. Bearers
/// keep the attribute.
pub fn promote_attribute(
    g: &PropertyGraph,
    new_node_class: &str,
    new_edge_class: &str,
    key: &str,
    affected_classes: &[String],
) -> Result<PropertyGraph, AdaptError> {
    for class in affected_classes {
        g.check_node_class(class)?;
    }
    if node_class_taken(g, new_node_class) {
        return Err(GraphError::ClassCollision(new_node_class.to_string()).into());
    }
    if edge_class_taken(g, new_edge_class) {
        return Err(GraphError::ClassCollision(new_edge_class.to_string()).into());
    }

    // values keyed by kind and exact rendering so 1 and 1.0 stay apart
    let mut values: BTreeMap<(ValueKind, String), (AttrValue, Vec<&str>)> = BTreeMap::new();
    for class in affected_classes {
        for &n in g.class_extent(class)? {
            let node = g.node(n);
            match node.attrs.get(key) {
                None | Some(AttrValue::Null) => {}
                Some(v) => values
                    .entry((v.kind(), v.to_string()))
                    .or_insert_with(|| (v.clone(), Vec::new()))
                    .1
                    .push(node.id.as_str()),
            }
        }
    }
    if values.is_empty() {
        return Err(AdaptError::AttributeAbsent {
            key: key.to_string(),
            classes: affected_classes.to_vec(),
        });
    }

    let mut node_ids: HashSet<String> = g.nodes().iter().map(|n| n.id.clone()).collect();
    let mut edge_ids: HashSet<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let mut b = g.rewrite();
    b.mark_derived_node_class(new_node_class)
        .mark_derived_edge_class(new_edge_class);
    for ((_, text), (value, bearers)) in values {
        let vid = fresh_id(&mut node_ids, format!("{new_node_class}:{text}"));
        let mut node = Node::new(vid.as_str(), new_node_class).with_attr(key, value);
        if key != "name" {
            node = node.with_attr("name", text.as_str());
        }
        b.node(node);
        for bearer in bearers {
            let eid = fresh_id(&mut edge_ids, format!("{new_edge_class}:{bearer}"));
            b.edge(Edge::undirected(eid, bearer, vid.as_str(), new_edge_class));
        }
    }
    Ok(b.build()?)
}
