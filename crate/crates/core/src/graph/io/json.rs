use serde::{Deserialize, Serialize};

use super::line_col;
use crate::graph::{Edge, GraphBuilder, GraphError, Node};

#[derive(Serialize, Deserialize)]
struct Document {
    #[serde(default)]
    nodes: Vec<Node>,
    #[serde(default)]
    edges: Vec<Edge>,
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    nodes: &'a [Node],
    edges: &'a [Edge],
}

pub(super) fn read(source: &str) -> Result<GraphBuilder, GraphError> {
    let doc: Document = serde_json::from_str(source).map_err(|e| {
        let (line, column) = if e.line() == 0 {
            line_col(source, source.len())
        } else {
            (e.line(), e.column())
        };
        GraphError::Parse {
            format: "json-nodelink",
            line,
            column,
            message: e.to_string(),
        }
    })?;
    let mut builder = GraphBuilder::new();
    for node in doc.nodes {
        builder.node(node);
    }
    for edge in doc.edges {
        builder.edge(edge);
    }
    Ok(builder)
}

pub(super) fn write(nodes: &[Node], edges: &[Edge]) -> String {
    serde_json::to_string_pretty(&DocumentRef { nodes, edges })
        .expect("graph documents always serialize")
}
