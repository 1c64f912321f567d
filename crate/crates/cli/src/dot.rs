//! Graphviz DOT rendering of interaction graphs, filled graphs, elimination
//! trees and tree decompositions. Fill edges are drawn dashed.

use std::fmt::Write;

use localelim::ordering::EliminationTree;
use localelim::{EliminationRecord, InteractionGraph, Problem, TreeDecomposition};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn block_label(p: &Problem, block: &[usize]) -> String {
    block.iter().map(|&v| p.name(v)).collect::<Vec<_>>().join(", ")
}

fn undirected(p: &Problem, name: &str, g: &InteractionGraph, dashed: &[(usize, usize)]) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in g.vertices() {
        writeln!(out, "  {};", quote(p.name(v))).unwrap();
    }
    for (u, v) in g.edges() {
        let style = if dashed.contains(&(u, v)) { " [style=dashed]" } else { "" };
        writeln!(out, "  {} -- {}{style};", quote(p.name(u)), quote(p.name(v))).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn interaction_dot(p: &Problem, g: &InteractionGraph) -> String {
    undirected(p, "interaction", g, &[])
}

pub fn filled_dot(p: &Problem, rec: &EliminationRecord) -> String {
    undirected(p, "filled", &rec.filled, &rec.fill)
}

/// One node per elimination step, with arcs from each step to its parent.
pub fn etree_dot(p: &Problem, rec: &EliminationRecord, tree: &EliminationTree) -> String {
    let mut out = String::from("digraph etree {\n");
    for (s, step) in rec.steps.iter().enumerate() {
        writeln!(out, "  s{s} [label={}];", quote(&block_label(p, &step.block))).unwrap();
    }
    for s in 0..tree.len() {
        if let Some(parent) = tree.parent(s) {
            writeln!(out, "  s{s} -> s{parent};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn td_dot(p: &Problem, td: &TreeDecomposition) -> String {
    let mut out = String::from("graph td {\n");
    for (b, bag) in td.bags().iter().enumerate() {
        let label = format!("{{{}}}", block_label(p, bag));
        let shape = if b == td.root() { ", peripheries=2" } else { "" };
        writeln!(out, "  b{b} [shape=box, label={}{shape}];", quote(&label)).unwrap();
    }
    for &(a, b) in td.edges() {
        writeln!(out, "  b{a} -- b{b};").unwrap();
    }
    out.push_str("}\n");
    out
}
