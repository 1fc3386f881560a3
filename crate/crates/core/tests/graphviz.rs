use std::collections::BTreeSet;
use std::path::PathBuf;

use byrdscope::corpus;
use byrdscope::graphviz::{graph_to_dot, labeled_graph_to_dot, tree_to_dot};
use byrdscope::monitors::{dcg_monitor, proof_tree_monitor, Arc, Graph, LabeledArc, LabeledGraph, Node, ProofTree};
use byrdscope::{parse_program, parse_query, run_collect, EngineOptions};
use proptest::prelude::*;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn queens_dcg_document_matches_golden_file() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let q = parse_query("main.").unwrap();
    let acc = run_collect(&p, &q, &EngineOptions::default(), &dcg_monitor()).unwrap().result;
    let dot = graph_to_dot(&acc.graph, "dcg");
    let path = golden("queens_main_dcg.dot");
    if std::env::var_os("BYRDSCOPE_BLESS").is_some() {
        std::fs::write(&path, &dot).unwrap();
    }
    assert_eq!(dot, std::fs::read_to_string(&path).unwrap());
    assert!(dot.contains("  \"main_0\" -> \"data_1\";\n"));
    assert!(!dot.contains('\r'));
}

#[test]
fn rendering_is_stable_across_runs() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let q = parse_query(&corpus::queens_query(5)).unwrap();
    let render = || {
        let t = run_collect(&p, &q, &EngineOptions::default(), &proof_tree_monitor()).unwrap().result;
        tree_to_dot(&t.proof_tree(), "proof-tree")
    };
    assert_eq!(render(), render());
}

#[test]
fn chrono_label_on_edge() {
    let g: LabeledGraph = [LabeledArc {
        from: Node::new("p/0"),
        chrono: 7,
        to: Node::new("q/0"),
    }]
    .into_iter()
    .collect();
    assert!(labeled_graph_to_dot(&g, "t").contains("\"p_0\" -> \"q_0\" [label=\"7\"];"));
}

#[test]
fn two_node_tree() {
    let t = ProofTree::node(Node::new("p/0"), vec![ProofTree::node(Node::new("q/0"), vec![])]);
    let dot = tree_to_dot(&t, "t");
    assert_eq!(dot.matches("[label=").count(), 2);
    assert_eq!(dot.matches("->").count(), 1);
}

fn node_lines(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count()
}

fn arb_label() -> impl Strategy<Value = String> {
    ("[a-z_]{1,3}", 0u32..3).prop_map(|(n, a)| format!("{n}/{a}"))
}

fn arb_tree() -> impl Strategy<Value = ProofTree> {
    let leaf = arb_label().prop_map(|l| ProofTree::node(Node::new(&l), vec![]));
    leaf.prop_recursive(4, 40, 4, |inner| {
        (arb_label(), proptest::collection::vec(inner, 0..4))
            .prop_map(|(l, kids)| ProofTree::node(Node::new(&l), kids))
    })
}

proptest! {
    #[test]
    fn graph_node_count_is_distinct_labels(arcs in proptest::collection::vec((arb_label(), arb_label()), 0..30)) {
        let g: Graph = arcs.iter().map(|(a, b)| Arc { from: Node::new(a), to: Node::new(b) }).collect();
        let distinct: BTreeSet<&String> = arcs.iter().flat_map(|(a, b)| [a, b]).collect();
        let dot = graph_to_dot(&g, "g");
        prop_assert_eq!(node_lines(&dot), distinct.len());
        prop_assert_eq!(dot.matches("->").count(), g.len());
        prop_assert_eq!(dot.clone(), graph_to_dot(&g.clone(), "g"));
    }

    #[test]
    fn tree_node_count_is_tree_size(t in arb_tree()) {
        let dot = tree_to_dot(&t, "t");
        prop_assert_eq!(node_lines(&dot), t.size());
        prop_assert_eq!(dot.matches("->").count(), t.size().saturating_sub(1));
    }
}
