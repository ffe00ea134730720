//! Random pivot scripts rendered with noisy spacing, keyword case and
//! comments, plus malformed scripts with known error positions.

use pivotladder::dsl::quote_name;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const CLASSES: [&str; 6] = ["Team", "Player", "TeamGameStats", "Team Stats", "mode", "_x9"];
const KEYS: [&str; 5] = ["name", "position", "height", "select", "a b"];

fn kw(rng: &mut ChaCha8Rng, word: &str) -> String {
    match rng.gen_range(0..3) {
        0 => word.to_string(),
        1 => word.to_ascii_uppercase(),
        _ => word
            .chars()
            .map(|c| {
                if rng.gen_bool(0.5) {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect(),
    }
}

fn gap(rng: &mut ChaCha8Rng) -> &'static str {
    [" ", " ", "  ", "\t", "\n  "].choose(rng).unwrap()
}

fn string(rng: &mut ChaCha8Rng) -> String {
    let body: String = (0..rng.gen_range(0..6))
        .map(|_| *["a", "Z", " ", "\\\"", "\\\\", "\\n", "é", "-"].choose(rng).unwrap())
        .collect();
    format!("\"{body}\"")
}

fn scalar(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => rng.gen_range(-50..500i64).to_string(),
        1 => format!("{:?}", rng.gen_range(-40..400i64) as f64 / 4.0),
        2 => string(rng),
        3 => {
            let b = if rng.gen_bool(0.5) { "true" } else { "false" };
            kw(rng, b)
        }
        4 => kw(rng, "null"),
        _ => format!("{}e{}", rng.gen_range(1..9), rng.gen_range(0..3)),
    }
}

fn name(rng: &mut ChaCha8Rng, pool: &[&str]) -> String {
    let n = pool.choose(rng).unwrap();
    // identifiers may always be quoted; others must be
    if rng.gen_bool(0.3) {
        format!("\"{n}\"")
    } else {
        quote_name(n)
    }
}

fn predicate(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => {
            let dir = *["", "any ", "out ", "in "].choose(rng).unwrap();
            let op = *["==", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
            format!("{} {}{} {}", kw(rng, "degree"), dir, op, rng.gen_range(0..9))
        }
        1 => {
            let items: Vec<String> = (0..rng.gen_range(0..4)).map(|_| scalar(rng)).collect();
            format!("{} {} [{}]", name(rng, &KEYS), kw(rng, "in"), items.join(", "))
        }
        2 => format!("{} {} {}", name(rng, &KEYS), kw(rng, "contains"), string(rng)),
        _ => {
            let op = *["==", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
            format!("{}{op}{}{}", name(rng, &KEYS), gap(rng), scalar(rng))
        }
    }
}

fn predicates(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..4);
    let parts: Vec<String> = (0..n).map(|_| predicate(rng)).collect();
    let and = format!(" {} ", kw(rng, "and"));
    parts.join(&and)
}

fn statement(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..13) {
        0 => {
            let mut s = format!("{} {}", kw(rng, "select"), name(rng, &CLASSES));
            if rng.gen_bool(0.6) {
                s = format!("{s} {} {}", kw(rng, "where"), predicates(rng));
            }
            s
        }
        1 | 2 => {
            let mut s = format!("{}{}{}", kw(rng, "pivot"), gap(rng), name(rng, &CLASSES));
            if rng.gen_bool(0.3) {
                s = format!("{s} {} {}", kw(rng, "via"), name(rng, &["playsFor", "stats for"]));
            }
            if rng.gen_bool(0.5) {
                let m = *["fanin", "fanout", "intersect", "smart", "scope"].choose(rng).unwrap();
                s = format!("{s} {} {}", kw(rng, "mode"), kw(rng, m));
            }
            s
        }
        3 => format!("{} {}", kw(rng, "filter"), predicates(rng)),
        4 => {
            let mut s = format!("{} {} {}", kw(rng, "group"), kw(rng, "by"), name(rng, &KEYS));
            if rng.gen_bool(0.5) {
                let order = if rng.gen_bool(0.5) { "asc" } else { "desc" };
                s = format!("{s} {}", kw(rng, order));
            }
            if rng.gen_bool(0.3) {
                s = format!("{s} {} {}", kw(rng, "bins"), rng.gen_range(1..10));
            }
            s
        }
        5 => {
            let labels: Vec<String> = (0..rng.gen_range(1..4)).map(|_| string(rng)).collect();
            format!("{} {}", kw(rng, "bins"), labels.join(" , "))
        }
        6 => format!("{} {}", kw(rng, "snip"), rng.gen_range(1..20)),
        7 => {
            let on = if rng.gen_bool(0.5) { "on" } else { "off" };
            format!("{} {}", kw(rng, "scope"), kw(rng, on))
        }
        8 => {
            let word = *["undo", "clear", "describe"].choose(rng).unwrap();
            kw(rng, word)
        }
        9 => {
            let mut s = format!("{} {}", kw(rng, "export"), string(rng));
            if rng.gen_bool(0.5) {
                s = format!("{s} {} {}", kw(rng, "format"), kw(rng, "json"));
            }
            s
        }
        10 => format!("{} {}", kw(rng, "adapt"), kw(rng, "report")),
        11 => format!("{} {} {}", kw(rng, "adapt"), kw(rng, "apply"), rng.gen_range(1..9)),
        _ => format!("{} {}", kw(rng, "load"), string(rng)),
    }
}

/// A valid script of `len` statements; at most one `load`, placed first.
pub fn random_script(rng: &mut ChaCha8Rng, len: usize) -> String {
    let mut out = String::new();
    if rng.gen_bool(0.3) {
        out.push_str(&format!("{} \"graph.graphml\";\n", kw(rng, "load")));
    }
    for _ in 0..len {
        let mut st = statement(rng);
        while st.to_ascii_lowercase().starts_with("load") {
            st = statement(rng);
        }
        out.push_str(&st);
        out.push(';');
        if rng.gen_bool(0.2) {
            out.push_str(" # note\n");
        }
        out.push_str(gap(rng));
    }
    out
}

/// Bad lines and the 1-based column of the error within the line.
const BAD_LINES: [(&str, usize); 12] = [
    ("select Team undo;", 13),
    ("select Team where;", 18),
    ("filter name == ;", 16),
    ("frobnicate;", 1),
    ("group position;", 7),
    ("scope maybe;", 7),
    ("pivot A mode sideways;", 14),
    ("snip -1;", 6),
    ("bins \"a\",;", 10),
    ("adapt;", 6),
    ("filter name = \"x\";", 13),
    ("pivot;", 6),
];

/// A script with one bad line, returning (source, line, column).
pub fn malformed_script(rng: &mut ChaCha8Rng, case: usize) -> (String, usize, usize) {
    let (bad, col) = BAD_LINES[case % BAD_LINES.len()];
    let before = rng.gen_range(0..4);
    let mut src = String::new();
    for _ in 0..before {
        // one statement per line, no multi-line gaps
        let st = statement(rng).replace('\n', " ");
        if st.to_ascii_lowercase().starts_with("load") {
            src.push_str("describe;\n");
        } else {
            src.push_str(&format!("{st};\n"));
        }
    }
    let indent = rng.gen_range(0..4);
    src.push_str(&" ".repeat(indent));
    src.push_str(bad);
    src.push_str("\nundo;\n");
    (src, before + 1, indent + col)
}
