//! DOT rendering for monitor graphs and proof trees.
//!
//! Output is deterministic: graph nodes are sorted by label and edges by
//! endpoints then label, so equal inputs give byte-identical documents.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use crate::monitors::{Graph, LabeledGraph, Node, ProofTree};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// `label` with every non-alphanumeric character replaced by `_`.
pub fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Assigns identifiers to labels in sorted order, suffixing `_2`, `_3`, ...
/// when two labels sanitize to the same identifier.
fn node_ids<'a>(labels: impl IntoIterator<Item = &'a Node>) -> BTreeMap<&'a Node, String> {
    let sorted: std::collections::BTreeSet<&Node> = labels.into_iter().collect();
    let mut taken = HashSet::new();
    let mut ids = BTreeMap::new();
    for node in sorted {
        let base = sanitize(node.label());
        let mut id = base.clone();
        let mut n = 2;
        while !taken.insert(id.clone()) {
            id = format!("{base}_{n}");
            n += 1;
        }
        ids.insert(node, id);
    }
    ids
}

fn document(title: &str, nodes: &[(String, &str)], edges: &[(String, String, Option<String>)]) -> String {
    let mut out = format!("digraph {} {{\n", quote(title));
    for (id, label) in nodes {
        let _ = writeln!(out, "  {} [label={}];", quote(id), quote(label));
    }
    for (from, to, label) in edges {
        match label {
            Some(l) => {
                let _ = writeln!(out, "  {} -> {} [label={}];", quote(from), quote(to), quote(l));
            }
            None => {
                let _ = writeln!(out, "  {} -> {};", quote(from), quote(to));
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn graph_to_dot(graph: &Graph, title: &str) -> String {
    let ids = node_ids(graph.iter().flat_map(|a| [&a.from, &a.to]));
    let nodes: Vec<(String, &str)> = ids.iter().map(|(n, id)| (id.clone(), n.label())).collect();
    // The set is ordered by (from, to) already.
    let edges: Vec<_> = graph
        .iter()
        .map(|a| (ids[&a.from].clone(), ids[&a.to].clone(), None))
        .collect();
    document(title, &nodes, &edges)
}

pub fn labeled_graph_to_dot(graph: &LabeledGraph, title: &str) -> String {
    let ids = node_ids(graph.iter().flat_map(|a| [&a.from, &a.to]));
    let nodes: Vec<(String, &str)> = ids.iter().map(|(n, id)| (id.clone(), n.label())).collect();
    let mut arcs: Vec<_> = graph.iter().collect();
    arcs.sort_by(|a, b| (&a.from, &a.to, a.chrono).cmp(&(&b.from, &b.to, b.chrono)));
    let edges: Vec<_> = arcs
        .into_iter()
        .map(|a| (ids[&a.from].clone(), ids[&a.to].clone(), Some(a.chrono.to_string())))
        .collect();
    document(title, &nodes, &edges)
}

/// Renders a proof tree with one DOT node per tree node, identified by its
/// preorder index, so repeated predicates stay distinct.
pub fn tree_to_dot(tree: &ProofTree, title: &str) -> String {
    let order = tree.preorder();
    let nodes: Vec<(String, &str)> = order
        .iter()
        .enumerate()
        .map(|(i, (node, _))| (format!("n{i}"), node.predicate.label()))
        .collect();
    let edges: Vec<_> = order
        .iter()
        .enumerate()
        .filter_map(|(i, (_, parent))| parent.map(|p| (format!("n{p}"), format!("n{i}"), None)))
        .collect();
    document(title, &nodes, &edges)
}
