//! Text, NDJSON and DOT renderings of a tableau.

use serde::Serialize;

use super::{Tableau, TableauNode};

fn line(n: &TableauNode) -> String {
    let mut s = format!("{} {} {}", n.id, n.sign, n.content);
    if let Some(r) = &n.rule {
        s.push_str(&format!("   [{r}"));
        if let Some(p) = n.premise {
            s.push_str(&format!(" from {p}"));
        }
        if let Some(d) = n.disambiguation {
            s.push_str(&format!(", alternative {d}"));
        }
        s.push(']');
    }
    s
}

/// One node per line, children indented below their parent.
pub fn text(t: &Tableau) -> String {
    let mut out = String::new();
    let mut stack: Vec<(usize, usize)> = t.nodes.iter().filter(|n| n.parent.is_none()).map(|n| (n.id, 0)).rev().collect();
    while let Some((id, depth)) = stack.pop() {
        let kids = t.children(id);
        out.push_str(&"  ".repeat(depth));
        out.push_str(&line(&t.nodes[id]));
        out.push('\n');
        // A single child continues the branch at the same depth.
        let next = if kids.len() == 1 { depth } else { depth + 1 };
        stack.extend(kids.into_iter().rev().map(|k| (k, next)));
    }
    out
}

#[derive(Serialize)]
struct Record<'a> {
    id: usize,
    parent: Option<usize>,
    sign: String,
    formula: String,
    rule: Option<&'a str>,
    premise: Option<usize>,
    disambiguation: Option<usize>,
    ur_state: Option<String>,
}

pub fn ndjson(t: &Tableau) -> String {
    let mut out = String::new();
    for n in &t.nodes {
        let r = Record {
            id: n.id,
            parent: n.parent,
            sign: n.sign.to_string(),
            formula: n.content.to_string(),
            rule: n.rule.as_deref(),
            premise: n.premise,
            disambiguation: n.disambiguation,
            ur_state: n.ur_state(),
        };
        out.push_str(&serde_json::to_string(&r).expect("records serialize"));
        out.push('\n');
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn dot(t: &Tableau) -> String {
    let mut out = String::from("digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in &t.nodes {
        let label = format!("{} {}", n.sign, n.content);
        out.push_str(&format!("  n{} [label=\"{}: {}\"];\n", n.id, n.id, escape(&label)));
    }
    for n in &t.nodes {
        if let Some(p) = n.parent {
            match &n.rule {
                Some(r) => out.push_str(&format!("  n{p} -> n{} [label=\"{}\"];\n", n.id, escape(r))),
                None => out.push_str(&format!("  n{p} -> n{};\n", n.id)),
            }
        }
    }
    out.push_str("}\n");
    out
}
