//! GraphML subset.
//!
//! Node and edge classes live under the reserved key id `class`. Attribute
//! kinds come from `attr.type` on the key declarations (`string`, `int` or
//! `long`, `float` or `double`, `boolean`). A `<data>` element carrying
//! `null="true"` holds a null value. Every written edge states `directed`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::line_col;
use crate::graph::{AttrValue, Attrs, Edge, GraphBuilder, GraphError, Node, ValueKind};

const CLASS_KEY: &str = "class";
const NAMESPACE: &str = "http://graphml.graphdrawing.org/xmlns";

struct KeyDecl {
    name: String,
    kind: ValueKind,
}

fn parse_error(source: &str, offset: usize, message: impl Into<String>) -> GraphError {
    let (line, column) = line_col(source, offset);
    GraphError::Parse {
        format: "graphml",
        line,
        column,
        message: message.into(),
    }
}

fn kind_of_type(ty: &str) -> Option<ValueKind> {
    match ty {
        "string" => Some(ValueKind::Text),
        "int" | "long" => Some(ValueKind::Int),
        "float" | "double" => Some(ValueKind::Real),
        "boolean" => Some(ValueKind::Bool),
        _ => None,
    }
}

fn type_of_kind(kind: ValueKind) -> &'static str {
    match kind {
        ValueKind::Int => "long",
        ValueKind::Real => "double",
        ValueKind::Bool => "boolean",
        ValueKind::Text | ValueKind::Null => "string",
    }
}

fn parse_value(kind: ValueKind, text: &str) -> Option<AttrValue> {
    Some(match kind {
        ValueKind::Text => AttrValue::Text(text.to_string()),
        ValueKind::Int => AttrValue::Int(text.trim().parse().ok()?),
        ValueKind::Real => AttrValue::Real(text.trim().parse().ok()?),
        ValueKind::Bool => match text.trim() {
            "true" | "1" => AttrValue::Bool(true),
            "false" | "0" => AttrValue::Bool(false),
            _ => return None,
        },
        ValueKind::Null => AttrValue::Null,
    })
}

pub(super) fn read(source: &str) -> Result<GraphBuilder, GraphError> {
    let doc = roxmltree::Document::parse(source).map_err(|e| {
        let pos = e.pos();
        GraphError::Parse {
            format: "graphml",
            line: pos.row as usize,
            column: pos.col as usize,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "graphml" {
        return Err(parse_error(source, root.range().start, "root element must be <graphml>"));
    }

    let mut keys: HashMap<String, KeyDecl> = HashMap::new();
    for key in root.children().filter(|n| n.has_tag_name("key")) {
        let at = key.range().start;
        let id = key
            .attribute("id")
            .ok_or_else(|| parse_error(source, at, "<key> without id"))?;
        if id == CLASS_KEY {
            continue;
        }
        let ty = key.attribute("attr.type").unwrap_or("string");
        let kind = kind_of_type(ty)
            .ok_or_else(|| parse_error(source, at, format!("unsupported attr.type `{ty}`")))?;
        let name = key.attribute("attr.name").unwrap_or(id).to_string();
        keys.insert(id.to_string(), KeyDecl { name, kind });
    }

    let mut builder = GraphBuilder::new();
    let Some(graph) = root.children().find(|n| n.has_tag_name("graph")) else {
        return Ok(builder);
    };
    let default_directed = graph.attribute("edgedefault").unwrap_or("directed") == "directed";

    let read_data = |element: roxmltree::Node| -> Result<(Option<String>, Attrs), GraphError> {
        let mut class = None;
        let mut attrs = Attrs::new();
        for data in element.children().filter(|n| n.has_tag_name("data")) {
            let at = data.range().start;
            let key = data
                .attribute("key")
                .ok_or_else(|| parse_error(source, at, "<data> without key"))?;
            let text = data.text().unwrap_or("");
            if key == CLASS_KEY {
                class = Some(text.to_string());
                continue;
            }
            let decl = keys
                .get(key)
                .ok_or_else(|| parse_error(source, at, format!("undeclared key `{key}`")))?;
            let value = if data.attribute("null") == Some("true") {
                AttrValue::Null
            } else {
                parse_value(decl.kind, text).ok_or_else(|| {
                    parse_error(
                        source,
                        at,
                        format!("`{text}` is not a valid {}", type_of_kind(decl.kind)),
                    )
                })?
            };
            attrs.insert(decl.name.clone(), value);
        }
        Ok((class, attrs))
    };

    let mut generated_edge = 0usize;
    for element in graph.children().filter(|n| n.is_element()) {
        let at = element.range().start;
        match element.tag_name().name() {
            "node" => {
                let id = element
                    .attribute("id")
                    .ok_or_else(|| parse_error(source, at, "<node> without id"))?;
                let (class, attrs) = read_data(element)?;
                let class = class.ok_or_else(|| {
                    parse_error(source, at, format!("node `{id}` has no class data"))
                })?;
                builder.node(Node {
                    id: id.to_string(),
                    class,
                    attrs,
                });
            }
            "edge" => {
                let source_id = element
                    .attribute("source")
                    .ok_or_else(|| parse_error(source, at, "<edge> without source"))?;
                let target_id = element
                    .attribute("target")
                    .ok_or_else(|| parse_error(source, at, "<edge> without target"))?;
                let id = match element.attribute("id") {
                    Some(id) => id.to_string(),
                    None => {
                        generated_edge += 1;
                        format!("e{generated_edge}")
                    }
                };
                let directed = match element.attribute("directed") {
                    Some("true") => true,
                    Some("false") => false,
                    Some(other) => {
                        return Err(parse_error(
                            source,
                            at,
                            format!("invalid directed value `{other}`"),
                        ))
                    }
                    None => default_directed,
                };
                let (class, attrs) = read_data(element)?;
                let class = class.ok_or_else(|| {
                    parse_error(source, at, format!("edge `{id}` has no class data"))
                })?;
                builder.edge(Edge {
                    id,
                    source: source_id.to_string(),
                    target: target_id.to_string(),
                    class,
                    directed,
                    attrs,
                });
            }
            _ => {}
        }
    }
    Ok(builder)
}

fn escape(text: &str, out: &mut String) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

fn escaped(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    escape(text, &mut out);
    out
}

/// Key ids per (attribute name, kind) for one domain (`node` or `edge`).
fn declare_keys<'a>(
    prefix: &str,
    items: impl Iterator<Item = &'a Attrs>,
) -> BTreeMap<(String, ValueKind), String> {
    let mut kinds: BTreeMap<String, Vec<ValueKind>> = BTreeMap::new();
    for attrs in items {
        for (name, value) in attrs {
            let entry = kinds.entry(name.clone()).or_default();
            let kind = value.kind();
            if kind != ValueKind::Null && !entry.contains(&kind) {
                entry.push(kind);
            }
        }
    }
    let mut out = BTreeMap::new();
    let mut n = 0;
    for (name, mut list) in kinds {
        if list.is_empty() {
            list.push(ValueKind::Text);
        }
        list.sort();
        for kind in list {
            out.insert((name.clone(), kind), format!("{prefix}{n}"));
            n += 1;
        }
    }
    out
}

fn write_data(keys: &BTreeMap<(String, ValueKind), String>, attrs: &Attrs, out: &mut String) {
    for (name, value) in attrs {
        let key = match value {
            AttrValue::Null => keys
                .range((name.clone(), ValueKind::Text)..)
                .next()
                .filter(|((n, _), _)| n == name)
                .map(|(_, id)| id),
            other => keys.get(&(name.clone(), other.kind())),
        }
        .expect("every attribute has a declared key");
        match value {
            AttrValue::Null => {
                let _ = writeln!(out, "      <data key=\"{key}\" null=\"true\"/>");
            }
            other => {
                let _ = writeln!(
                    out,
                    "      <data key=\"{key}\">{}</data>",
                    escaped(&other.to_string())
                );
            }
        }
    }
}

pub(super) fn write(nodes: &[Node], edges: &[Edge]) -> String {
    let node_keys = declare_keys("n", nodes.iter().map(|n| &n.attrs));
    let edge_keys = declare_keys("e", edges.iter().map(|e| &e.attrs));

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<graphml xmlns=\"{NAMESPACE}\">");
    let _ = writeln!(
        out,
        "  <key id=\"{CLASS_KEY}\" for=\"all\" attr.name=\"{CLASS_KEY}\" attr.type=\"string\"/>"
    );
    for (domain, keys) in [("node", &node_keys), ("edge", &edge_keys)] {
        for ((name, kind), id) in keys {
            let _ = writeln!(
                out,
                "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{}\" attr.type=\"{}\"/>",
                escaped(name),
                type_of_kind(*kind)
            );
        }
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for node in nodes {
        let _ = writeln!(out, "    <node id=\"{}\">", escaped(&node.id));
        let _ = writeln!(
            out,
            "      <data key=\"{CLASS_KEY}\">{}</data>",
            escaped(&node.class)
        );
        write_data(&node_keys, &node.attrs, &mut out);
        out.push_str("    </node>\n");
    }
    for edge in edges {
        let _ = writeln!(
            out,
            "    <edge id=\"{}\" source=\"{}\" target=\"{}\" directed=\"{}\">",
            escaped(&edge.id),
            escaped(&edge.source),
            escaped(&edge.target),
            edge.directed
        );
        let _ = writeln!(
            out,
            "      <data key=\"{CLASS_KEY}\">{}</data>",
            escaped(&edge.class)
        );
        write_data(&edge_keys, &edge.attrs, &mut out);
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
