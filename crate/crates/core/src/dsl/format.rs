use std::fmt::Write;

use super::ast::{Script, SortOrder, StmtKind};
use crate::graph::{AttrValue, Direction};
use crate::pivot::{BinDef, Literal, Predicate};

const KEYWORDS: &[&str] = &[
    "load", "format", "select", "where", "pivot", "via", "mode", "filter", "group", "by", "asc",
    "desc", "bins", "snip", "scope", "on", "off", "undo", "clear", "describe", "export", "adapt",
    "report", "apply", "and", "degree", "in", "out", "any", "contains", "true", "false", "null",
    "fanin", "fanout", "intersect", "smart",
];

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A class name or key as written in a script: bare when it is a plain
/// identifier that is not a keyword, quoted otherwise.
pub fn quote_name(name: &str) -> String {
    let mut chars = name.chars();
    let bare = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(name));
    if bare {
        name.to_string()
    } else {
        quote(name)
    }
}

fn scalar(v: &AttrValue) -> String {
    match v {
        AttrValue::Text(s) => quote(s),
        AttrValue::Int(i) => i.to_string(),
        AttrValue::Real(x) => format!("{x:?}"),
        AttrValue::Bool(b) => b.to_string(),
        AttrValue::Null => "null".into(),
    }
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Value(v) => scalar(v),
        Literal::List(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

fn predicate(p: &Predicate) -> String {
    match p {
        Predicate::Attribute(a) => format!("{} {} {}", quote_name(&a.key), a.op, literal(&a.value)),
        Predicate::Degree(d) => {
            let dir = match d.direction {
                Direction::Any => "any",
                Direction::Outgoing => "out",
                Direction::Incoming => "in",
            };
            format!("degree {dir} {} {}", d.op, d.value)
        }
        // Only categorical selections have a textual form.
        Predicate::Bins(b) => {
            let values: Vec<String> = b
                .bins
                .iter()
                .filter_map(|def| match def {
                    BinDef::Value { value } => Some(scalar(value)),
                    _ => None,
                })
                .collect();
            format!("{} in [{}]", quote_name(&b.key), values.join(", "))
        }
    }
}

fn predicates(ps: &[Predicate]) -> String {
    ps.iter().map(predicate).collect::<Vec<_>>().join(" and ")
}

/// Canonical text: one statement per line, lowercase keywords, normalized
/// spacing and quoting.
pub fn format_script(script: &Script) -> String {
    let mut out = String::new();
    for st in &script.statements {
        let line = match &st.kind {
            StmtKind::Load { path, format } => match format {
                Some(f) => format!("load {} format {}", quote(path), quote_name(f)),
                None => format!("load {}", quote(path)),
            },
            StmtKind::Select { class, predicates: ps } if ps.is_empty() => {
                format!("select {}", quote_name(class))
            }
            StmtKind::Select { class, predicates: ps } => {
                format!("select {} where {}", quote_name(class), predicates(ps))
            }
            StmtKind::Pivot { class, via, mode } => {
                let mut s = format!("pivot {}", quote_name(class));
                if let Some(v) = via {
                    write!(s, " via {}", quote_name(v)).unwrap();
                }
                if let Some(m) = mode {
                    write!(s, " mode {}", m.keyword()).unwrap();
                }
                s
            }
            StmtKind::Filter { predicates: ps } => format!("filter {}", predicates(ps)),
            StmtKind::Group { key, order, bins } => {
                let mut s = format!("group by {}", quote_name(key));
                match order {
                    Some(SortOrder::Asc) => s.push_str(" asc"),
                    Some(SortOrder::Desc) => s.push_str(" desc"),
                    None => {}
                }
                if let Some(n) = bins {
                    write!(s, " bins {n}").unwrap();
                }
                s
            }
            StmtKind::Bins { labels } => {
                let parts: Vec<String> = labels.iter().map(|l| quote(l)).collect();
                format!("bins {}", parts.join(", "))
            }
            StmtKind::Snip { filter } => format!("snip {filter}"),
            StmtKind::Scope { on } => format!("scope {}", if *on { "on" } else { "off" }),
            StmtKind::Undo => "undo".into(),
            StmtKind::Clear => "clear".into(),
            StmtKind::Describe => "describe".into(),
            StmtKind::Export { path, format } => match format {
                Some(f) => format!("export {} format {}", quote(path), quote_name(f)),
                None => format!("export {}", quote(path)),
            },
            StmtKind::AdaptReport => "adapt report".into(),
            StmtKind::AdaptApply { proposal } => format!("adapt apply {proposal}"),
        };
        out.push_str(&line);
        out.push_str(";\n");
    }
    out
}
