//! Deterministic DOT and JSON renderings of multiway, causal and branchial
//! graphs.

use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiway::{hash_hex, BranchialGraph, CausalGraph, MultiwayGraph};

pub const LABEL_LIMIT: usize = 64;

/// A state key cut at 64 characters, with its stable hash appended when cut.
pub fn short_label(key: &str) -> String {
    if key.chars().count() <= LABEL_LIMIT {
        return key.to_string();
    }
    let head: String = key.chars().take(LABEL_LIMIT).collect();
    format!("{head}… #{}", &hash_hex(key)[..8])
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn multiway_dot(g: &MultiwayGraph) -> String {
    let mut s = String::from("digraph multiway {\n  rankdir=TB;\n  node [shape=box];\n");
    for (i, st) in g.states.iter().enumerate() {
        let root = if g.roots.contains(&i) { ", penwidth=2" } else { "" };
        writeln!(s, "  s{i} [label={}, tooltip={}{root}];", quote(&short_label(&st.label)), quote(&st.hash)).unwrap();
    }
    for e in &g.events {
        writeln!(s, "  s{} -> s{} [label={}];", e.input, e.output, quote(&format!("{}@{}", e.rule_label, e.position)))
            .unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn causal_dot(g: &MultiwayGraph, c: &CausalGraph) -> String {
    let mut s = String::from("digraph causal {\n  node [shape=ellipse];\n");
    for (i, e) in g.events.iter().enumerate() {
        let label = format!("e{i}: {}@{}", e.rule_label, e.position);
        writeln!(s, "  e{i} [label={}];", quote(&short_label(&label))).unwrap();
    }
    for &(a, b) in &c.edges {
        writeln!(s, "  e{a} -> e{b};").unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn branchial_dot(g: &MultiwayGraph, b: &BranchialGraph) -> String {
    let mut s = format!("graph branchial_{} {{\n  node [shape=box];\n", b.slice);
    for &v in &b.vertices {
        writeln!(s, "  s{v} [label={}];", quote(&short_label(&g.states[v].label))).unwrap();
    }
    for &(a, b) in &b.edges {
        writeln!(s, "  s{a} -- s{b};").unwrap();
    }
    s.push_str("}\n");
    s
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Other(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontends::string::StringSystem;
    use crate::multiway::{evolve, EvolveConfig, Mode};

    #[test]
    fn labels_are_cut_with_hash() {
        assert_eq!(short_label("AB"), "AB");
        let long = "x".repeat(100);
        let l = short_label(&long);
        assert!(l.starts_with(&"x".repeat(64)));
        assert!(l.ends_with(&hash_hex(&long)[..8]));
    }

    #[test]
    fn dot_is_stable() {
        let sys = StringSystem::parse("A->AB,A->BA").unwrap();
        let g = evolve(&sys, &["A".to_string()], &EvolveConfig::new(2, Mode::Evolution)).unwrap().graph;
        let a = multiway_dot(&g);
        assert_eq!(a, multiway_dot(&g));
        assert!(a.starts_with("digraph multiway"));
        assert_eq!(a.matches(" -> ").count(), g.events.len());
        let c = g.causal_graph();
        assert_eq!(causal_dot(&g, &c).matches(" -> ").count(), c.edges.len());
        let b = g.branchial(1, 1).unwrap();
        assert_eq!(branchial_dot(&g, &b).matches(" -- ").count(), b.edges.len());
        assert!(quote("a\"b").contains("\\\""));
    }
}
