//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod scripts;

use std::collections::{BTreeSet, HashMap};

use pivotladder::graph::{AttrValue, Direction, Edge, GraphBuilder, Node, NodeSet, PropertyGraph};
use pivotladder::pivot::{CompareOp, Operation, PivotMode, Predicate, Session};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Ids = BTreeSet<String>;

pub struct GraphShape {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_classes: usize,
    pub edge_classes: usize,
}

pub const SMALL: GraphShape = GraphShape {
    max_nodes: 200,
    max_edges: 800,
    max_classes: 5,
    edge_classes: 3,
};

pub const TINY: GraphShape = GraphShape {
    max_nodes: 24,
    max_edges: 60,
    max_classes: 4,
    edge_classes: 2,
};

pub fn random_graph(rng: &mut ChaCha8Rng, shape: &GraphShape) -> PropertyGraph {
    let classes = rng.gen_range(1..=shape.max_classes);
    let n = rng.gen_range(1..=shape.max_nodes);
    let m = rng.gen_range(0..=shape.max_edges);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        // every class gets at least one node
        let class = if i < classes { i } else { rng.gen_range(0..classes) };
        let mut node = Node::new(format!("n{i}"), format!("C{class}"));
        match rng.gen_range(0..20) {
            0 => {}
            1 => node = node.with_attr("a", AttrValue::Null),
            _ => node = node.with_attr("a", rng.gen_range(0..6i64)),
        }
        if rng.gen_bool(0.8) {
            node = node.with_attr("t", *["x", "y", "z"].choose(rng).unwrap());
        }
        b.node(node);
    }
    for j in 0..m {
        let s = format!("n{}", rng.gen_range(0..n));
        let t = format!("n{}", rng.gen_range(0..n));
        let class = format!("e{}", rng.gen_range(0..shape.edge_classes));
        let mut e = if rng.gen_bool(0.5) {
            Edge::directed(format!("x{j}"), s, t, class)
        } else {
            Edge::undirected(format!("x{j}"), s, t, class)
        };
        if rng.gen_bool(0.2) {
            e = e.with_attr("w", rng.gen_range(0..100i64));
        }
        b.edge(e);
    }
    b.build().expect("generated graph is valid")
}

pub fn ids(g: &PropertyGraph, set: &NodeSet) -> Ids {
    set.iter().map(|&n| g.node(n).id.clone()).collect()
}

/// Incidences of an edge as (node, other end, direction it satisfies).
fn incidences(e: &Edge) -> [(&str, &str, [bool; 3]); 2] {
    // [any, outgoing, incoming]
    let (src, dst) = if e.directed {
        ([true, true, false], [true, false, true])
    } else {
        ([true, true, true], [true, true, true])
    };
    [
        (e.source.as_str(), e.target.as_str(), src),
        (e.target.as_str(), e.source.as_str(), dst),
    ]
}

fn allows(flags: [bool; 3], d: Direction) -> bool {
    match d {
        Direction::Any => flags[0],
        Direction::Outgoing => flags[1],
        Direction::Incoming => flags[2],
    }
}

/// Per-edge scan: every edge leaving a seed towards a node of `class`.
pub fn oracle_neighbors(
    g: &PropertyGraph,
    seeds: &Ids,
    class: &str,
    edge_class: Option<&str>,
    direction: Direction,
) -> Ids {
    let class_of: HashMap<&str, &str> = g
        .nodes()
        .iter()
        .map(|n| (n.id.as_str(), n.class.as_str()))
        .collect();
    let mut out = Ids::new();
    for e in g.edges() {
        if edge_class.is_some_and(|c| c != e.class) {
            continue;
        }
        for (from, to, flags) in incidences(e) {
            if seeds.contains(from) && allows(flags, direction) && class_of[to] == class {
                out.insert(to.to_string());
            }
        }
    }
    out
}

pub fn oracle_degree(g: &PropertyGraph, node: &str, direction: Direction, within: &Ids) -> i64 {
    g.edges()
        .iter()
        .flat_map(incidences)
        .filter(|(from, to, flags)| *from == node && allows(*flags, direction) && within.contains(*to))
        .count() as i64
}

/// The restricted predicate family the generators emit.
#[derive(Debug, Clone)]
pub enum SimplePred {
    IntEq(i64),
    IntGe(i64),
    TextEq(&'static str),
    TextNe(&'static str),
    DegreeGe(i64),
}

impl SimplePred {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        match rng.gen_range(0..5) {
            0 => SimplePred::IntEq(rng.gen_range(0..6)),
            1 => SimplePred::IntGe(rng.gen_range(0..6)),
            2 => SimplePred::TextEq(["x", "y", "z"].choose(rng).unwrap()),
            3 => SimplePred::TextNe(["x", "y", "z"].choose(rng).unwrap()),
            _ => SimplePred::DegreeGe(rng.gen_range(0..3)),
        }
    }

    pub fn predicate(&self) -> Predicate {
        match *self {
            SimplePred::IntEq(v) => Predicate::attr("a", CompareOp::Eq, v),
            SimplePred::IntGe(v) => Predicate::attr("a", CompareOp::Ge, v),
            SimplePred::TextEq(v) => Predicate::attr("t", CompareOp::Eq, v),
            SimplePred::TextNe(v) => Predicate::attr("t", CompareOp::Ne, v),
            SimplePred::DegreeGe(v) => Predicate::degree(Direction::Any, CompareOp::Ge, v),
        }
    }

    /// Members of `set` satisfying the predicate; degrees count edges
    /// into `subgraph`.
    pub fn retain(&self, g: &PropertyGraph, set: &mut Ids, subgraph: &Ids) {
        if let SimplePred::DegreeGe(v) = *self {
            let mut degree: HashMap<&str, i64> = HashMap::new();
            for e in g.edges() {
                for (from, to, _) in incidences(e) {
                    if subgraph.contains(to) {
                        *degree.entry(from).or_default() += 1;
                    }
                }
            }
            set.retain(|id| degree.get(id.as_str()).copied().unwrap_or(0) >= v);
            return;
        }
        let nodes: HashMap<&str, &Node> = g.nodes().iter().map(|n| (n.id.as_str(), n)).collect();
        set.retain(|id| {
            let node = nodes[id.as_str()];
            let a = node.attrs.get("a");
            let t = node.attrs.get("t").and_then(|v| v.as_str());
            match *self {
                SimplePred::IntEq(v) => matches!(a, Some(AttrValue::Int(x)) if *x == v),
                SimplePred::IntGe(v) => matches!(a, Some(AttrValue::Int(x)) if *x >= v),
                SimplePred::TextEq(v) => t == Some(v),
                SimplePred::TextNe(v) => t != Some(v),
                SimplePred::DegreeGe(_) => unreachable!(),
            }
        });
    }
}

#[derive(Debug, Clone)]
pub enum ChainOp {
    Pivot {
        class: String,
        edge_class: Option<String>,
        direction: Direction,
    },
    Filter(SimplePred),
}

/// A seed class plus up to `max_pivots` pivots and `max_filters` filters.
pub fn random_fanout_chain(
    rng: &mut ChaCha8Rng,
    g: &PropertyGraph,
    max_pivots: usize,
    max_filters: usize,
) -> (String, Vec<ChainOp>) {
    let classes = g.node_classes().to_vec();
    let edge_classes = g.edge_classes().to_vec();
    let seed = classes.choose(rng).unwrap().clone();
    let pivots = rng.gen_range(0..=max_pivots);
    let filters = rng.gen_range(0..=max_filters);
    let mut ops: Vec<ChainOp> = (0..pivots)
        .map(|_| ChainOp::Pivot {
            class: classes.choose(rng).unwrap().clone(),
            edge_class: if !edge_classes.is_empty() && rng.gen_bool(0.3) {
                Some(edge_classes.choose(rng).unwrap().clone())
            } else {
                None
            },
            direction: *[Direction::Any, Direction::Any, Direction::Outgoing, Direction::Incoming]
                .choose(rng)
                .unwrap(),
        })
        .collect();
    for _ in 0..filters {
        let at = rng.gen_range(0..=ops.len());
        ops.insert(at, ChainOp::Filter(SimplePred::random(rng)));
    }
    (seed, ops)
}

/// Active sets of every step, computed from the edge list alone.
pub fn oracle_chain(g: &PropertyGraph, seed: &str, ops: &[ChainOp]) -> Vec<Ids> {
    let extent: Ids = g
        .nodes()
        .iter()
        .filter(|n| n.class == seed)
        .map(|n| n.id.clone())
        .collect();
    let mut steps = vec![extent.clone()];
    let mut subgraph = extent;
    for op in ops {
        match op {
            ChainOp::Pivot {
                class,
                edge_class,
                direction,
            } => {
                let prev = steps.last().unwrap();
                let base = oracle_neighbors(g, prev, class, edge_class.as_deref(), *direction);
                subgraph = prev.union(&base).cloned().collect();
                steps.push(base);
            }
            ChainOp::Filter(p) => {
                let cur = steps.last_mut().unwrap();
                p.retain(g, cur, &subgraph);
            }
        }
    }
    steps
}

pub fn run_fanout_chain(g: &PropertyGraph, session: &mut Session, seed: &str, ops: &[ChainOp]) {
    session.select_seed(seed, vec![]).unwrap();
    for op in ops {
        match op {
            ChainOp::Pivot {
                class,
                edge_class,
                direction,
            } => {
                session
                    .pivot(class, edge_class.as_deref(), *direction, PivotMode::FanOut)
                    .unwrap();
            }
            ChainOp::Filter(p) => {
                session.apply_filter(vec![p.predicate()]).unwrap();
            }
        }
    }
    let _ = g;
}

pub const MODES: [PivotMode; 5] = [
    PivotMode::FanOut,
    PivotMode::FanIn,
    PivotMode::IntersectPrior,
    PivotMode::ScopeDefault,
    PivotMode::Smart,
];

/// A random operation log over every operation kind. Some operations may
/// be invalid for the session they land in; those are rejected on replay.
pub fn random_ops(rng: &mut ChaCha8Rng, g: &PropertyGraph, len: usize) -> Vec<Operation> {
    let classes = g.node_classes().to_vec();
    let mut ops = vec![Operation::Select {
        class: classes.choose(rng).unwrap().clone(),
        predicates: if rng.gen_bool(0.3) {
            vec![SimplePred::random(rng).predicate()]
        } else {
            vec![]
        },
    }];
    for _ in 1..len {
        let op = match rng.gen_range(0..10) {
            0..=4 => Operation::Pivot {
                class: classes.choose(rng).unwrap().clone(),
                edge_class: None,
                direction: Direction::Any,
                mode: *MODES.choose(rng).unwrap(),
            },
            5 | 6 => Operation::Filter {
                predicates: vec![SimplePred::random(rng).predicate()],
            },
            7 => Operation::Snip {
                filter: pivotladder::pivot::FilterId(rng.gen_range(1..5)),
            },
            8 => Operation::Restore {
                filter: pivotladder::pivot::FilterId(rng.gen_range(1..5)),
            },
            _ => Operation::Scope {
                global: rng.gen_bool(0.5),
            },
        };
        ops.push(op);
    }
    ops
}

/// Build a session by performing `ops` in order, skipping rejected ones.
pub fn session_from(g: std::sync::Arc<PropertyGraph>, ops: &[Operation]) -> Session {
    let mut s = Session::new(g);
    for op in ops {
        let _ = s.perform(op.clone());
    }
    s
}
