//! Immutable property graph snapshots with class-pair adjacency indexes.
//!
//! A [`PropertyGraph`] is built once through [`GraphBuilder`] and never
//! mutated afterwards. Rewrites (reification, adaptive edges, attribute
//! promotion) go back through a builder and produce a new snapshot whose
//! version is one higher.

mod error;
pub mod io;
mod reify;
mod schema;
mod value;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use error::GraphError;
pub use io::{export_subgraph, load_graph, write_graph, Extraction, GraphFormat, Provenance};
pub use reify::{reify_attributed_edges, Reified};
pub use schema::{
    ClassConnection, ConnectionEntry, Directedness, EdgeClassSummary, NodeClassSummary,
    SchemaSummary,
};
pub use value::{AttrValue, Attrs, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIx(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIx(pub u32);

pub type NodeSet = BTreeSet<NodeIx>;
pub type EdgeSet = BTreeSet<EdgeIx>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub class: String,
    #[serde(default)]
    pub attrs: Attrs,
}

impl Node {
    pub fn new(id: impl Into<String>, class: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            class: class.into(),
            attrs: Attrs::new(),
        }
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<AttrValue>) -> Self {
        self.attrs.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub target: String,
    pub class: String,
    #[serde(default)]
    pub directed: bool,
    #[serde(default)]
    pub attrs: Attrs,
}

impl Edge {
    pub fn undirected(
        id: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
        class: impl Into<String>,
    ) -> Self {
        Edge {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            class: class.into(),
            directed: false,
            attrs: Attrs::new(),
        }
    }

    pub fn directed(
        id: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
        class: impl Into<String>,
    ) -> Self {
        Edge {
            directed: true,
            ..Edge::undirected(id, source, target, class)
        }
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<AttrValue>) -> Self {
        self.attrs.insert(key.into(), value.into());
        self
    }
}

/// Which incident edges a pivot may follow, seen from the seed side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Any,
    Outgoing,
    Incoming,
}

/// How an edge touches one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incidence {
    Out,
    In,
    Undirected,
}

impl Incidence {
    pub fn matches(self, direction: Direction) -> bool {
        match direction {
            Direction::Any => true,
            Direction::Outgoing => self != Incidence::In,
            Direction::Incoming => self != Incidence::Out,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdjEntry {
    pub other: NodeIx,
    pub edge: EdgeIx,
    pub incidence: Incidence,
}

#[derive(Debug, Clone, Copy)]
struct Bucket {
    node_class: u32,
    edge_class: u32,
    start: u32,
    end: u32,
}

/// Result of expanding a seed set: the reached nodes and the edges used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expansion {
    pub nodes: NodeSet,
    pub edges: EdgeSet,
}

#[derive(Debug, Clone)]
pub struct PropertyGraph {
    version: u64,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    endpoints: Vec<(NodeIx, NodeIx)>,
    node_lookup: HashMap<String, NodeIx>,
    edge_lookup: HashMap<String, EdgeIx>,
    node_classes: Vec<String>,
    edge_classes: Vec<String>,
    class_extent: Vec<Vec<NodeIx>>,
    // CSR adjacency, each node's run sorted by (neighbor class, edge class)
    adj: Vec<AdjEntry>,
    adj_offsets: Vec<u32>,
    buckets: Vec<Bucket>,
    bucket_offsets: Vec<u32>,
    derived_edge_classes: BTreeSet<String>,
    derived_node_classes: BTreeSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    version: u64,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    derived_edge_classes: BTreeSet<String>,
    derived_node_classes: BTreeSet<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder {
            version: 1,
            ..Default::default()
        }
    }

    pub fn node(&mut self, node: Node) -> &mut Self {
        self.nodes.push(node);
        self
    }

    pub fn edge(&mut self, edge: Edge) -> &mut Self {
        self.edges.push(edge);
        self
    }

    pub fn mark_derived_edge_class(&mut self, class: impl Into<String>) -> &mut Self {
        self.derived_edge_classes.insert(class.into());
        self
    }

    pub fn mark_derived_node_class(&mut self, class: impl Into<String>) -> &mut Self {
        self.derived_node_classes.insert(class.into());
        self
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn build(self) -> Result<PropertyGraph, GraphError> {
        let GraphBuilder {
            version,
            nodes,
            edges,
            derived_edge_classes,
            derived_node_classes,
        } = self;

        let mut node_lookup = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.class.is_empty() {
                return Err(GraphError::EmptyClass {
                    what: "node",
                    id: node.id.clone(),
                });
            }
            if node_lookup.insert(node.id.clone(), NodeIx(i as u32)).is_some() {
                return Err(GraphError::DuplicateNode(node.id.clone()));
            }
        }

        let mut edge_lookup = HashMap::with_capacity(edges.len());
        let mut endpoints = Vec::with_capacity(edges.len());
        for (i, edge) in edges.iter().enumerate() {
            if edge.class.is_empty() {
                return Err(GraphError::EmptyClass {
                    what: "edge",
                    id: edge.id.clone(),
                });
            }
            if edge_lookup.insert(edge.id.clone(), EdgeIx(i as u32)).is_some() {
                return Err(GraphError::DuplicateEdge(edge.id.clone()));
            }
            let resolve = |id: &str| {
                node_lookup
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::DanglingEndpoint {
                        edge: edge.id.clone(),
                        node: id.to_string(),
                    })
            };
            endpoints.push((resolve(&edge.source)?, resolve(&edge.target)?));
        }

        let node_classes: Vec<String> = nodes
            .iter()
            .map(|n| n.class.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let edge_classes: Vec<String> = edges
            .iter()
            .map(|e| e.class.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let class_id = |classes: &[String], name: &str| {
            classes.binary_search_by(|c| c.as_str().cmp(name)).unwrap() as u32
        };
        let node_class_of: Vec<u32> = nodes
            .iter()
            .map(|n| class_id(&node_classes, &n.class))
            .collect();
        let edge_class_of: Vec<u32> = edges
            .iter()
            .map(|e| class_id(&edge_classes, &e.class))
            .collect();

        let mut class_extent = vec![Vec::new(); node_classes.len()];
        for (i, &c) in node_class_of.iter().enumerate() {
            class_extent[c as usize].push(NodeIx(i as u32));
        }

        // counting sort of incidences into CSR form
        let mut degree = vec![0u32; nodes.len()];
        for &(s, t) in &endpoints {
            degree[s.0 as usize] += 1;
            degree[t.0 as usize] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(nodes.len() + 1);
        let mut total = 0u32;
        adj_offsets.push(0);
        for d in &degree {
            total += d;
            adj_offsets.push(total);
        }
        let placeholder = AdjEntry {
            other: NodeIx(0),
            edge: EdgeIx(0),
            incidence: Incidence::Undirected,
        };
        let mut adj = vec![placeholder; total as usize];
        let mut cursor: Vec<u32> = adj_offsets[..nodes.len()].to_vec();
        for (i, (edge, &(s, t))) in edges.iter().zip(&endpoints).enumerate() {
            let (out_inc, in_inc) = if edge.directed {
                (Incidence::Out, Incidence::In)
            } else {
                (Incidence::Undirected, Incidence::Undirected)
            };
            let e = EdgeIx(i as u32);
            adj[cursor[s.0 as usize] as usize] = AdjEntry {
                other: t,
                edge: e,
                incidence: out_inc,
            };
            cursor[s.0 as usize] += 1;
            adj[cursor[t.0 as usize] as usize] = AdjEntry {
                other: s,
                edge: e,
                incidence: in_inc,
            };
            cursor[t.0 as usize] += 1;
        }

        let mut buckets = Vec::new();
        let mut bucket_offsets = Vec::with_capacity(nodes.len() + 1);
        bucket_offsets.push(0u32);
        for n in 0..nodes.len() {
            let (lo, hi) = (adj_offsets[n] as usize, adj_offsets[n + 1] as usize);
            let run = &mut adj[lo..hi];
            run.sort_unstable_by_key(|a| {
                (
                    node_class_of[a.other.0 as usize],
                    edge_class_of[a.edge.0 as usize],
                    a.other,
                    a.edge,
                )
            });
            let mut start = 0;
            while start < run.len() {
                let key = |a: &AdjEntry| {
                    (
                        node_class_of[a.other.0 as usize],
                        edge_class_of[a.edge.0 as usize],
                    )
                };
                let k = key(&run[start]);
                let mut end = start + 1;
                while end < run.len() && key(&run[end]) == k {
                    end += 1;
                }
                buckets.push(Bucket {
                    node_class: k.0,
                    edge_class: k.1,
                    start: (lo + start) as u32,
                    end: (lo + end) as u32,
                });
                start = end;
            }
            bucket_offsets.push(buckets.len() as u32);
        }

        Ok(PropertyGraph {
            version,
            nodes,
            edges,
            endpoints,
            node_lookup,
            edge_lookup,
            node_classes,
            edge_classes,
            class_extent,
            adj,
            adj_offsets,
            buckets,
            bucket_offsets,
            derived_edge_classes,
            derived_node_classes,
        })
    }
}

impl PropertyGraph {
    pub fn empty() -> Self {
        GraphBuilder::new().build().expect("empty graph is valid")
    }

    /// A builder holding a copy of this graph, stamped with the next version.
    pub fn rewrite(&self) -> GraphBuilder {
        GraphBuilder {
            version: self.version + 1,
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            derived_edge_classes: self.derived_edge_classes.clone(),
            derived_node_classes: self.derived_node_classes.clone(),
        }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, ix: NodeIx) -> &Node {
        &self.nodes[ix.0 as usize]
    }

    pub fn edge(&self, ix: EdgeIx) -> &Edge {
        &self.edges[ix.0 as usize]
    }

    pub fn endpoints(&self, ix: EdgeIx) -> (NodeIx, NodeIx) {
        self.endpoints[ix.0 as usize]
    }

    pub fn node_ix(&self, id: &str) -> Option<NodeIx> {
        self.node_lookup.get(id).copied()
    }

    pub fn edge_ix(&self, id: &str) -> Option<EdgeIx> {
        self.edge_lookup.get(id).copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeIx> {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeIx> {
        (0..self.edges.len() as u32).map(EdgeIx)
    }

    pub fn node_classes(&self) -> &[String] {
        &self.node_classes
    }

    pub fn edge_classes(&self) -> &[String] {
        &self.edge_classes
    }

    pub fn has_node_class(&self, class: &str) -> bool {
        self.node_class_id(class).is_some()
    }

    pub fn has_edge_class(&self, class: &str) -> bool {
        self.edge_class_id(class).is_some()
    }

    pub fn derived_edge_classes(&self) -> &BTreeSet<String> {
        &self.derived_edge_classes
    }

    pub fn derived_node_classes(&self) -> &BTreeSet<String> {
        &self.derived_node_classes
    }

    fn node_class_id(&self, class: &str) -> Option<u32> {
        self.node_classes
            .binary_search_by(|c| c.as_str().cmp(class))
            .ok()
            .map(|i| i as u32)
    }

    fn edge_class_id(&self, class: &str) -> Option<u32> {
        self.edge_classes
            .binary_search_by(|c| c.as_str().cmp(class))
            .ok()
            .map(|i| i as u32)
    }

    pub fn check_node_class(&self, class: &str) -> Result<(), GraphError> {
        match self.node_class_id(class) {
            Some(_) => Ok(()),
            None => Err(GraphError::UnknownNodeClass {
                name: class.to_string(),
                known: self.node_classes.clone(),
            }),
        }
    }

    pub fn check_edge_class(&self, class: &str) -> Result<(), GraphError> {
        match self.edge_class_id(class) {
            Some(_) => Ok(()),
            None => Err(GraphError::UnknownEdgeClass {
                name: class.to_string(),
                known: self.edge_classes.clone(),
            }),
        }
    }

    /// All nodes of a class, in index order.
    pub fn class_extent(&self, class: &str) -> Result<&[NodeIx], GraphError> {
        self.check_node_class(class)?;
        let id = self.node_class_id(class).unwrap();
        Ok(&self.class_extent[id as usize])
    }

    /// Incidences of one node, sorted by (neighbor class, edge class).
    pub fn incidences(&self, node: NodeIx) -> &[AdjEntry] {
        let n = node.0 as usize;
        &self.adj[self.adj_offsets[n] as usize..self.adj_offsets[n + 1] as usize]
    }

    /// Nodes of `target_class` connected to at least one seed by an edge
    /// matching `edge_class` and `direction`.
    pub fn neighbors(
        &self,
        seeds: impl IntoIterator<Item = NodeIx>,
        target_class: &str,
        edge_class: Option<&str>,
        direction: Direction,
    ) -> Result<NodeSet, GraphError> {
        Ok(self
            .expand(seeds, target_class, edge_class, direction)?
            .nodes)
    }

    /// Like [`neighbors`](Self::neighbors), also returning every edge that
    /// witnesses a seed-to-target connection.
    pub fn expand(
        &self,
        seeds: impl IntoIterator<Item = NodeIx>,
        target_class: &str,
        edge_class: Option<&str>,
        direction: Direction,
    ) -> Result<Expansion, GraphError> {
        self.check_node_class(target_class)?;
        let target = self.node_class_id(target_class).unwrap();
        let edge_filter = match edge_class {
            Some(name) => {
                self.check_edge_class(name)?;
                self.edge_class_id(name)
            }
            None => None,
        };

        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for seed in seeds {
            let n = seed.0 as usize;
            let run =
                &self.buckets[self.bucket_offsets[n] as usize..self.bucket_offsets[n + 1] as usize];
            let first = run.partition_point(|b| b.node_class < target);
            for bucket in run[first..].iter().take_while(|b| b.node_class == target) {
                if edge_filter.is_some_and(|ec| ec != bucket.edge_class) {
                    continue;
                }
                for entry in &self.adj[bucket.start as usize..bucket.end as usize] {
                    if entry.incidence.matches(direction) {
                        nodes.push(entry.other);
                        edges.push(entry.edge);
                    }
                }
            }
        }
        nodes.sort_unstable();
        nodes.dedup();
        edges.sort_unstable();
        edges.dedup();
        Ok(Expansion {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
        })
    }

    pub fn schema_summary(&self) -> SchemaSummary {
        SchemaSummary::of(self)
    }

    /// Sorted external ids for a set of nodes.
    pub fn node_id_list(&self, set: &NodeSet) -> Vec<String> {
        let mut ids: Vec<String> = set.iter().map(|&n| self.node(n).id.clone()).collect();
        ids.sort();
        ids
    }

    pub fn edge_id_list(&self, set: &EdgeSet) -> Vec<String> {
        let mut ids: Vec<String> = set.iter().map(|&e| self.edge(e).id.clone()).collect();
        ids.sort();
        ids
    }

    pub fn resolve_nodes<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<NodeSet, GraphError> {
        ids.into_iter()
            .map(|id| {
                self.node_ix(id)
                    .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
            })
            .collect()
    }
}
