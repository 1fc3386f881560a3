//! Reference implementations written directly against the event list,
//! sharing no code with the monitors they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use byrdscope::{Event, Port};

const ROOT: &str = "<query>/0";

fn label(e: &Event) -> String {
    format!("{}/{}", e.predicate.name, e.predicate.arity)
}

fn external(events: &[Event]) -> impl Iterator<Item = &Event> {
    events
        .iter()
        .filter(|e| matches!(e.port, Port::Call | Port::Exit | Port::Fail | Port::Redo))
}

pub fn call_count(events: &[Event]) -> u64 {
    events.iter().filter(|e| e.port == Port::Call).count() as u64
}

pub fn port_counts(events: &[Event]) -> BTreeMap<Port, u64> {
    let mut m = BTreeMap::new();
    for e in events {
        *m.entry(e.port).or_insert(0) += 1;
    }
    m
}

pub fn depth_counts(events: &[Event]) -> BTreeMap<u32, u64> {
    let mut m = BTreeMap::new();
    for e in events {
        *m.entry(e.depth).or_insert(0) += 1;
    }
    m
}

/// Consecutive external events, paired.
pub fn cfg_arcs(events: &[Event]) -> BTreeSet<(String, String)> {
    let labels: Vec<String> = std::iter::once(ROOT.to_string())
        .chain(external(events).map(label))
        .collect();
    labels.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

pub fn cfg_chrono_arcs(events: &[Event]) -> BTreeSet<(String, u64, String)> {
    let mut prev = ROOT.to_string();
    let mut out = BTreeSet::new();
    for e in external(events) {
        out.insert((prev, e.chrono, label(e)));
        prev = label(e);
    }
    out
}

/// Caller of each call, found by tracking active goal ids.
pub fn dcg_arcs(events: &[Event]) -> BTreeSet<(String, String)> {
    let mut active: Vec<(u64, String)> = Vec::new();
    let mut out = BTreeSet::new();
    for e in external(events) {
        match e.port {
            Port::Call => {
                let caller = active.last().map_or(ROOT.to_string(), |(_, l)| l.clone());
                out.insert((caller, label(e)));
                active.push((e.goal_id, label(e)));
            }
            Port::Redo => active.push((e.goal_id, label(e))),
            _ => {
                let (g, _) = active.pop().expect("balanced trace");
                assert_eq!(g, e.goal_id);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub label: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn labels(&self, out: &mut Vec<String>) {
        out.push(self.label.clone());
        for c in &self.children {
            c.labels(out);
        }
    }
}

/// The proof as the goals whose last external port is `exit`, nested by
/// the call relation and ordered by call time.
pub fn proof_tree(events: &[Event]) -> Option<Tree> {
    let mut last_port: HashMap<u64, Port> = HashMap::new();
    let mut labels: HashMap<u64, String> = HashMap::new();
    let mut children: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut active: Vec<u64> = Vec::new();
    for e in external(events) {
        last_port.insert(e.goal_id, e.port);
        match e.port {
            Port::Call => {
                let parent = active.last().copied().unwrap_or(0);
                children.entry(parent).or_default().push(e.goal_id);
                labels.insert(e.goal_id, label(e));
                active.push(e.goal_id);
            }
            Port::Redo => active.push(e.goal_id),
            _ => {
                active.pop();
            }
        }
    }
    fn build(
        g: u64,
        labels: &HashMap<u64, String>,
        children: &HashMap<u64, Vec<u64>>,
        proven: &dyn Fn(u64) -> bool,
    ) -> Tree {
        Tree {
            label: labels[&g].clone(),
            children: children
                .get(&g)
                .into_iter()
                .flatten()
                .filter(|c| proven(**c))
                .map(|c| build(*c, labels, children, proven))
                .collect(),
        }
    }
    let proven = |g: u64| last_port.get(&g) == Some(&Port::Exit);
    let mut top: Vec<Tree> = children
        .get(&0)
        .into_iter()
        .flatten()
        .filter(|g| proven(**g))
        .map(|g| build(*g, &labels, &children, &proven))
        .collect();
    match top.len() {
        0 => None,
        1 => top.pop(),
        _ => Some(Tree {
            label: ROOT.to_string(),
            children: top,
        }),
    }
}

/// Final port of every goal id.
pub fn final_ports(events: &[Event]) -> HashMap<u64, Port> {
    external(events).map(|e| (e.goal_id, e.port)).collect()
}
