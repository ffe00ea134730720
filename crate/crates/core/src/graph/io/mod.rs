//! Graph documents: json-nodelink and a GraphML subset.

mod graphml;
mod json;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EdgeSet, GraphError, NodeSet, PropertyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    #[serde(alias = "graphml-subset")]
    Graphml,
    #[serde(alias = "json-nodelink")]
    Json,
}

impl GraphFormat {
    /// Guess from a file name: `.json` is json-nodelink, anything else GraphML.
    pub fn from_path(path: &str) -> GraphFormat {
        if path.to_ascii_lowercase().ends_with(".json") {
            GraphFormat::Json
        } else {
            GraphFormat::Graphml
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphFormat::Graphml => "graphml",
            GraphFormat::Json => "json",
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "graphml" | "graphml-subset" | "xml" => Ok(GraphFormat::Graphml),
            "json" | "json-nodelink" | "nodelink" => Ok(GraphFormat::Json),
            _ => Err(GraphError::UnknownFormat(s.to_string())),
        }
    }
}

/// Parse a graph document into a version-1 snapshot.
pub fn load_graph(source: &str, format: GraphFormat) -> Result<PropertyGraph, GraphError> {
    let builder = match format {
        GraphFormat::Json => json::read(source)?,
        GraphFormat::Graphml => graphml::read(source)?,
    };
    builder.build()
}

/// Serialize a whole graph.
pub fn write_graph(g: &PropertyGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Json => json::write(g.nodes(), g.edges()),
        GraphFormat::Graphml => graphml::write(g.nodes(), g.edges()),
    }
}

/// The traversed part of a graph, ready for download.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub node_ids: NodeSet,
    pub edge_ids: EdgeSet,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub step: usize,
    pub category: String,
    pub size: usize,
}

/// Serialize the nodes and edges of an extraction. Fails if the extraction
/// names ids outside `g` or an edge whose endpoint was not extracted.
pub fn export_subgraph(
    g: &PropertyGraph,
    x: &Extraction,
    format: GraphFormat,
) -> Result<String, GraphError> {
    if let Some(n) = x.node_ids.iter().find(|n| n.0 as usize >= g.node_count()) {
        return Err(GraphError::UnknownNode(format!("#{}", n.0)));
    }
    if let Some(e) = x.edge_ids.iter().find(|e| e.0 as usize >= g.edge_count()) {
        return Err(GraphError::UnknownEdge(format!("#{}", e.0)));
    }
    for &e in &x.edge_ids {
        let (s, t) = g.endpoints(e);
        for end in [s, t] {
            if !x.node_ids.contains(&end) {
                return Err(GraphError::EndpointNotExtracted {
                    edge: g.edge(e).id.clone(),
                    node: g.node(end).id.clone(),
                });
            }
        }
    }
    let nodes: Vec<_> = x.node_ids.iter().map(|&n| g.node(n).clone()).collect();
    let edges: Vec<_> = x.edge_ids.iter().map(|&e| g.edge(e).clone()).collect();
    Ok(match format {
        GraphFormat::Json => json::write(&nodes, &edges),
        GraphFormat::Graphml => graphml::write(&nodes, &edges),
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AttrValue, Edge, GraphBuilder, Node};

    fn sample() -> PropertyGraph {
        let mut b = GraphBuilder::new();
        b.node(
            Node::new("Alice", "Doctor")
                .with_attr("name", "Alice")
                .with_attr("age", 52i64),
        )
        .node(
            Node::new("Bob", "Patient")
                .with_attr("sex", "male")
                .with_attr("weight", 81.5)
                .with_attr("insured", true)
                .with_attr("note", AttrValue::Null),
        )
        .node(Node::new("Carol", "Patient").with_attr("sex", "female"))
        .edge(Edge::undirected("e1", "Alice", "Bob", "treats").with_attr("since", 2010i64))
        .edge(Edge::directed("e2", "Alice", "Carol", "treats"));
        b.build().unwrap()
    }

    fn same_content(a: &PropertyGraph, b: &PropertyGraph) {
        let mut an = a.nodes().to_vec();
        let mut bn = b.nodes().to_vec();
        an.sort_by(|x, y| x.id.cmp(&y.id));
        bn.sort_by(|x, y| x.id.cmp(&y.id));
        assert_eq!(an, bn);
        let mut ae = a.edges().to_vec();
        let mut be = b.edges().to_vec();
        ae.sort_by(|x, y| x.id.cmp(&y.id));
        be.sort_by(|x, y| x.id.cmp(&y.id));
        assert_eq!(ae, be);
    }

    #[test]
    fn whole_graph_round_trips_in_both_formats() {
        let g = sample();
        for format in [GraphFormat::Json, GraphFormat::Graphml] {
            let text = write_graph(&g, format);
            let h = load_graph(&text, format).unwrap();
            same_content(&g, &h);
            assert_eq!(h.version(), 1);
        }
    }

    #[test]
    fn empty_documents_load() {
        assert_eq!(load_graph("{}", GraphFormat::Json).unwrap().node_count(), 0);
        let xml = r#"<graphml><graph edgedefault="undirected"/></graphml>"#;
        assert_eq!(load_graph(xml, GraphFormat::Graphml).unwrap().node_count(), 0);
        let empty = Extraction::default();
        let g = sample();
        for format in [GraphFormat::Json, GraphFormat::Graphml] {
            let doc = export_subgraph(&g, &empty, format).unwrap();
            assert_eq!(load_graph(&doc, format).unwrap().node_count(), 0);
        }
    }

    #[test]
    fn extraction_with_missing_endpoint_is_rejected() {
        let g = sample();
        let x = Extraction {
            node_ids: [g.node_ix("Alice").unwrap()].into_iter().collect(),
            edge_ids: [g.edge_ix("e1").unwrap()].into_iter().collect(),
            provenance: vec![],
        };
        let err = export_subgraph(&g, &x, GraphFormat::Json).unwrap_err();
        assert_eq!(
            err,
            GraphError::EndpointNotExtracted {
                edge: "e1".into(),
                node: "Bob".into()
            }
        );
    }

    #[test]
    fn json_errors_carry_location_and_dangling_ids_are_named() {
        let err = load_graph("{\n  \"nodes\": [ }", GraphFormat::Json).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let doc = r#"{"nodes":[{"id":"a","class":"A"}],
                      "edges":[{"id":"e","source":"a","target":"zz","class":"r"}]}"#;
        let err = load_graph(doc, GraphFormat::Json).unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn format_names_parse() {
        assert_eq!("graphml-subset".parse::<GraphFormat>().unwrap(), GraphFormat::Graphml);
        assert_eq!("JSON".parse::<GraphFormat>().unwrap(), GraphFormat::Json);
        assert!("csv".parse::<GraphFormat>().is_err());
        assert_eq!(GraphFormat::from_path("out/x.json"), GraphFormat::Json);
    }
}
