//! Small hand-built graphs used by the examples, the test suites and the CLI
//! demos.

use crate::graph::{AttrValue, Edge, GraphBuilder, Node, PropertyGraph};

fn named(id: &str, class: &str) -> Node {
    Node::new(id, class).with_attr("name", id)
}

/// Three doctors, two patients, four `treats` edges.
pub fn hospital() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    b.node(named("Alice", "Doctor"))
        .node(named("Dave", "Doctor"))
        .node(named("Eve", "Doctor"))
        .node(named("Bob", "Patient").with_attr("sex", "male"))
        .node(named("Carol", "Patient").with_attr("sex", "female"))
        .edge(Edge::undirected("e1", "Alice", "Bob", "treats"))
        .edge(Edge::undirected("e2", "Alice", "Carol", "treats"))
        .edge(Edge::undirected("e3", "Dave", "Bob", "treats"))
        .edge(Edge::undirected("e4", "Eve", "Carol", "treats"));
    b.build().expect("hospital fixture is valid")
}

/// Doctors, patients and insurers where pivoting back from an insurer
/// reaches a patient the starting doctor never treated.
pub fn mediated() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    for id in ["D1", "D2"] {
        b.node(named(id, "Doctor"));
    }
    for id in ["Pa", "Pb", "Pc"] {
        b.node(named(id, "Patient"));
    }
    for id in ["I1", "I2"] {
        b.node(named(id, "Insurer"));
    }
    for (i, (s, t, class)) in [
        ("D1", "Pa", "treats"),
        ("D1", "Pb", "treats"),
        ("D2", "Pc", "treats"),
        ("Pa", "I1", "insuredBy"),
        ("Pb", "I2", "insuredBy"),
        ("Pc", "I1", "insuredBy"),
    ]
    .into_iter()
    .enumerate()
    {
        b.edge(Edge::undirected(format!("m{}", i + 1), s, t, class));
    }
    b.build().expect("mediated fixture is valid")
}

/// Result of one game in [`football`]: (game, winner, loser, stadium).
pub const GAMES: [(&str, &str, &str, &str); 6] = [
    ("G1", "OSU", "MICH", "Horseshoe"),
    ("G2", "PSU", "OSU", "Beaver"),
    ("G3", "OSU", "ORE", "Horseshoe"),
    ("G4", "FSU", "MICH", "Doak"),
    ("G5", "ORE", "FSU", "Autzen"),
    ("G6", "PSU", "MICH", "Beaver"),
];

const TEAMS: [(&str, &str, &str); 5] = [
    ("FSU", "Florida State", "Doak"),
    ("OSU", "Ohio State", "Horseshoe"),
    ("MICH", "Michigan", "BigHouse"),
    ("PSU", "Penn State", "Beaver"),
    ("ORE", "Oregon", "Autzen"),
];

const ROSTERS: [(&str, &[(&str, i64)]); 5] = [
    (
        "FSU",
        &[
            ("QB", 191),
            ("QB", 188),
            ("WR", 183),
            ("WR", 185),
            ("WR", 178),
            ("RB", 180),
            ("RB", 176),
            ("TE", 196),
        ],
    ),
    ("OSU", &[("QB", 193), ("WR", 182), ("RB", 179), ("LB", 188)]),
    ("MICH", &[("QB", 190), ("WR", 186), ("TE", 198)]),
    ("PSU", &[("QB", 189), ("RB", 181)]),
    ("ORE", &[("QB", 187), ("WR", 180), ("WR", 184)]),
];

/// College football: teams, players, stadiums, games and per-team game
/// statistics.
///
/// Players point at their team with directed `playsFor` edges. Each game has
/// two `TeamGameStats` nodes (one per team) whose `outcome` is `WIN` or
/// `LOSS`; stats connect to their team (`statsFor`) and game (`statsOf`), and
/// games connect directly to both teams (`played`) and to a stadium
/// (`playedAt`).
pub fn football() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    for (id, name, stadium) in TEAMS {
        b.node(
            Node::new(id, "Team")
                .with_attr("name", name)
                .with_attr("abbrev", id),
        );
        b.edge(Edge::undirected(format!("home-{id}"), id, stadium, "homeField"));
    }
    for stadium in ["Doak", "Horseshoe", "BigHouse", "Beaver", "Autzen"] {
        b.node(Node::new(stadium, "Stadium").with_attr("name", stadium));
    }
    for (team, roster) in ROSTERS {
        for (i, (position, height)) in roster.iter().enumerate() {
            let id = format!("{team}-{}", i + 1);
            b.node(
                Node::new(&id, "Player")
                    .with_attr("name", id.as_str())
                    .with_attr("position", *position)
                    .with_attr("height", *height)
                    .with_attr("number", (i as i64 + 1) * 3),
            );
            b.edge(Edge::directed(format!("plays-{id}"), &id, team, "playsFor"));
        }
    }
    for (game, winner, loser, stadium) in GAMES {
        b.node(Node::new(game, "Game").with_attr("name", game));
        b.edge(Edge::undirected(format!("at-{game}"), game, stadium, "playedAt"));
        for (team, outcome, points) in [(winner, "WIN", 28i64), (loser, "LOSS", 17)] {
            let stats = format!("{game}-{team}");
            b.node(
                Node::new(&stats, "TeamGameStats")
                    .with_attr("outcome", outcome)
                    .with_attr("points", points),
            );
            b.edge(Edge::undirected(format!("sf-{stats}"), &stats, team, "statsFor"));
            b.edge(Edge::undirected(format!("so-{stats}"), &stats, game, "statsOf"));
            b.edge(Edge::undirected(format!("pl-{stats}"), game, team, "played"));
        }
    }
    b.build().expect("football fixture is valid")
}

/// Actors, movies and directors, with ages.
pub fn movies() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    for (id, age) in [("Ann", 34i64), ("Ben", 51), ("Cat", 28), ("Dan", 45)] {
        b.node(named(id, "Actor").with_attr("age", age));
    }
    for (id, year) in [("M1", 1999i64), ("M2", 2005), ("M3", 2012), ("M4", 2020)] {
        b.node(named(id, "Movie").with_attr("year", year));
    }
    for (id, age) in [("Rae", 62i64), ("Sam", 38)] {
        b.node(named(id, "Director").with_attr("age", age));
    }
    let acted = [
        ("Ann", "M1"),
        ("Ann", "M2"),
        ("Ben", "M1"),
        ("Ben", "M3"),
        ("Cat", "M2"),
        ("Cat", "M4"),
        ("Dan", "M3"),
        ("Dan", "M4"),
    ];
    for (i, (a, m)) in acted.into_iter().enumerate() {
        b.edge(Edge::undirected(format!("a{i}"), a, m, "actedIn"));
    }
    for (i, (d, m)) in [("Rae", "M1"), ("Sam", "M2"), ("Rae", "M3"), ("Sam", "M4")]
        .into_iter()
        .enumerate()
    {
        b.edge(Edge::directed(format!("d{i}"), d, m, "directed"));
    }
    b.build().expect("movie fixture is valid")
}

/// Two treatments, two patients, two insurers on two disjoint paths.
pub fn treatments() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    for id in ["T1", "T2"] {
        b.node(named(id, "Treatment"));
    }
    for id in ["Pa", "Pb"] {
        b.node(named(id, "Patient"));
    }
    for id in ["I1", "I2"] {
        b.node(named(id, "Insurer"));
    }
    b.edge(Edge::undirected("t1", "T1", "Pa", "receives"))
        .edge(Edge::undirected("t2", "T2", "Pb", "receives"))
        .edge(Edge::undirected("t3", "Pa", "I1", "insuredBy"))
        .edge(Edge::undirected("t4", "Pb", "I2", "insuredBy"));
    b.build().expect("treatment fixture is valid")
}

/// Eight treatments wired to ten patients and three insurers, with shared
/// patients, patients holding two policies, and an uninsured patient.
pub fn treatments8() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    for i in 1..=8 {
        b.node(named(&format!("T{i}"), "Treatment"));
    }
    for i in 1..=10 {
        b.node(named(&format!("P{i}"), "Patient"));
    }
    for i in 1..=3 {
        b.node(named(&format!("I{i}"), "Insurer"));
    }
    let receives = [
        (1, 1),
        (1, 2),
        (2, 2),
        (2, 3),
        (3, 4),
        (4, 5),
        (4, 6),
        (5, 6),
        (6, 7),
        (6, 10),
        (7, 8),
        (7, 9),
        (8, 10),
    ];
    for (i, (t, p)) in receives.into_iter().enumerate() {
        b.edge(Edge::undirected(format!("r{i}"), format!("T{t}"), format!("P{p}"), "receives"));
    }
    let insured = [
        (1, 1),
        (2, 1),
        (2, 2),
        (3, 2),
        (4, 3),
        (5, 1),
        (6, 3),
        (7, 2),
        (8, 2),
        (8, 3),
        (9, 1),
    ];
    for (i, (p, ins)) in insured.into_iter().enumerate() {
        b.edge(Edge::undirected(format!("i{i}"), format!("P{p}"), format!("I{ins}"), "insuredBy"));
    }
    b.build().expect("treatment fixture is valid")
}

/// Students and professors with a `country` attribute, including a null
/// value and a missing key.
pub fn countries() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    let students: [(&str, Option<AttrValue>); 6] = [
        ("S1", Some("US".into())),
        ("S2", Some("FR".into())),
        ("S3", Some(AttrValue::Null)),
        ("S4", None),
        ("S5", Some("DE".into())),
        ("S6", Some("US".into())),
    ];
    let professors: [(&str, Option<AttrValue>); 4] = [
        ("P1", Some("US".into())),
        ("P2", Some("DE".into())),
        ("P3", Some(AttrValue::Null)),
        ("P4", Some("IT".into())),
    ];
    for (class, rows) in [("Student", &students[..]), ("Professor", &professors[..])] {
        for (id, country) in rows {
            let mut n = named(id, class);
            if let Some(c) = country {
                n = n.with_attr("country", c.clone());
            }
            b.node(n);
        }
    }
    b.node(named("Dept", "Department"));
    for (i, id) in ["S1", "S2", "S3", "S4", "S5", "S6", "P1", "P2", "P3", "P4"]
        .into_iter()
        .enumerate()
    {
        b.edge(Edge::undirected(format!("m{i}"), id, "Dept", "memberOf"));
    }
    b.build().expect("country fixture is valid")
}
