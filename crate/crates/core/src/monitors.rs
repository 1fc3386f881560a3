//! Built-in monitors: counters, histograms, control flow graphs, the
//! dynamic call graph and the proof tree.
//!
//! Graph and tree nodes are identified by `name/arity`. Monitors built with
//! `with_args` append the event's rendered arguments to that label when the
//! trace carries them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc as Shared;

use serde_json::{json, Map, Value};

use crate::collect::{BoxedMonitor, Monitor, MonitorError, Output, StopFlag};
use crate::graphviz;
use crate::trace_model::{Event, Port, Predicate, QUERY_ROOT_NAME};

/// Graph or tree node label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(Shared<str>);

impl Node {
    pub fn new(label: &str) -> Self {
        Node(label.into())
    }

    pub fn of_predicate(p: &Predicate) -> Self {
        Node(p.canonical().into())
    }

    /// The synthetic query root, `<query>/0`.
    pub fn root() -> Self {
        Node(format!("{QUERY_ROOT_NAME}/0").into())
    }

    fn of_event(event: &Event, with_args: bool) -> Self {
        match &event.args {
            Some(args) if with_args => {
                Node(format!("{}({})", event.predicate.canonical(), args.join(", ")).into())
            }
            _ => Node::of_predicate(&event.predicate),
        }
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub from: Node,
    pub to: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledArc {
    pub from: Node,
    pub chrono: u64,
    pub to: Node,
}

pub type Graph = BTreeSet<Arc>;
pub type LabeledGraph = BTreeSet<LabeledArc>;

/// Applies one event to a call stack: call and redo push, exit and fail
/// pop, internal ports leave it alone.
pub fn update_call_stack<T>(port: Port, current: T, mut stack: Vec<T>) -> Result<Vec<T>, MonitorError> {
    match port {
        Port::Call | Port::Redo => stack.push(current),
        // The guard performs the pop; a successful one falls through.
        Port::Exit | Port::Fail if stack.pop().is_none() => {
            return Err(MonitorError::MalformedTrace(format!("{port} with an empty call stack")));
        }
        _ => {}
    }
    Ok(stack)
}

pub struct CountCall;

pub fn count_call_monitor() -> CountCall {
    CountCall
}

impl Monitor for CountCall {
    type Acc = u64;

    fn name(&self) -> &str {
        "count-calls"
    }

    fn initialize(&self) -> u64 {
        0
    }

    fn filter(&self, event: &Event, count: u64) -> Result<(u64, StopFlag), MonitorError> {
        let count = if event.port == Port::Call { count + 1 } else { count };
        Ok((count, StopFlag::Continue))
    }

    fn finish(&self, count: &u64) -> Option<Output> {
        Some(Output::Json(json!(count)))
    }
}

pub struct PortHistogram;

pub fn port_histogram_monitor() -> PortHistogram {
    PortHistogram
}

impl Monitor for PortHistogram {
    type Acc = BTreeMap<Port, u64>;

    fn name(&self) -> &str {
        "port-histogram"
    }

    fn initialize(&self) -> Self::Acc {
        BTreeMap::new()
    }

    fn filter(&self, event: &Event, mut acc: Self::Acc) -> Result<(Self::Acc, StopFlag), MonitorError> {
        *acc.entry(event.port).or_default() += 1;
        Ok((acc, StopFlag::Continue))
    }

    fn finish(&self, acc: &Self::Acc) -> Option<Output> {
        let map: Map<String, Value> = acc.iter().map(|(p, n)| (p.as_str().to_string(), json!(n))).collect();
        Some(Output::Json(Value::Object(map)))
    }
}

pub struct DepthHistogram;

pub fn depth_histogram_monitor() -> DepthHistogram {
    DepthHistogram
}

impl Monitor for DepthHistogram {
    type Acc = BTreeMap<u32, u64>;

    fn name(&self) -> &str {
        "depth-histogram"
    }

    fn initialize(&self) -> Self::Acc {
        BTreeMap::new()
    }

    fn filter(&self, event: &Event, mut acc: Self::Acc) -> Result<(Self::Acc, StopFlag), MonitorError> {
        *acc.entry(event.depth).or_default() += 1;
        Ok((acc, StopFlag::Continue))
    }

    fn finish(&self, acc: &Self::Acc) -> Option<Output> {
        let map: Map<String, Value> = acc.iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
        Some(Output::Json(Value::Object(map)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgAcc {
    pub previous: Node,
    pub graph: Graph,
}

/// Control flow graph: an arc from the predicate of each external event to
/// the predicate of the next one.
pub struct Cfg {
    with_args: bool,
}

pub fn cfg_monitor() -> Cfg {
    Cfg { with_args: false }
}

impl Cfg {
    pub fn with_args(self) -> Self {
        Cfg { with_args: true }
    }
}

impl Monitor for Cfg {
    type Acc = CfgAcc;

    fn name(&self) -> &str {
        "cfg"
    }

    fn initialize(&self) -> CfgAcc {
        CfgAcc {
            previous: Node::root(),
            graph: Graph::new(),
        }
    }

    fn filter(&self, event: &Event, mut acc: CfgAcc) -> Result<(CfgAcc, StopFlag), MonitorError> {
        if event.is_external() {
            let current = Node::of_event(event, self.with_args);
            acc.graph.insert(Arc {
                from: acc.previous,
                to: current.clone(),
            });
            acc.previous = current;
        }
        Ok((acc, StopFlag::Continue))
    }

    fn finish(&self, acc: &CfgAcc) -> Option<Output> {
        Some(Output::Dot(graphviz::graph_to_dot(&acc.graph, "cfg")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgChronoAcc {
    pub previous: Node,
    pub graph: LabeledGraph,
}

/// Control flow graph whose arcs carry the chrono of the traversal.
pub struct CfgChrono {
    with_args: bool,
}

pub fn cfg_chrono_monitor() -> CfgChrono {
    CfgChrono { with_args: false }
}

impl CfgChrono {
    pub fn with_args(self) -> Self {
        CfgChrono { with_args: true }
    }
}

impl Monitor for CfgChrono {
    type Acc = CfgChronoAcc;

    fn name(&self) -> &str {
        "cfg-chrono"
    }

    fn initialize(&self) -> CfgChronoAcc {
        CfgChronoAcc {
            previous: Node::root(),
            graph: LabeledGraph::new(),
        }
    }

    fn filter(&self, event: &Event, mut acc: CfgChronoAcc) -> Result<(CfgChronoAcc, StopFlag), MonitorError> {
        if event.is_external() {
            let current = Node::of_event(event, self.with_args);
            acc.graph.insert(LabeledArc {
                from: acc.previous,
                chrono: event.chrono,
                to: current.clone(),
            });
            acc.previous = current;
        }
        Ok((acc, StopFlag::Continue))
    }

    fn finish(&self, acc: &CfgChronoAcc) -> Option<Output> {
        Some(Output::Dot(graphviz::labeled_graph_to_dot(&acc.graph, "cfg-chrono")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcgAcc {
    pub stack: Vec<Node>,
    pub graph: Graph,
}

/// Dynamic call graph. The caller of each call is recovered from a call
/// stack rebuilt from the ports.
pub struct Dcg {
    with_args: bool,
}

pub fn dcg_monitor() -> Dcg {
    Dcg { with_args: false }
}

impl Dcg {
    pub fn with_args(self) -> Self {
        Dcg { with_args: true }
    }
}

impl Monitor for Dcg {
    type Acc = DcgAcc;

    fn name(&self) -> &str {
        "dcg"
    }

    fn initialize(&self) -> DcgAcc {
        DcgAcc {
            stack: vec![Node::root()],
            graph: Graph::new(),
        }
    }

    fn filter(&self, event: &Event, mut acc: DcgAcc) -> Result<(DcgAcc, StopFlag), MonitorError> {
        if !event.is_external() {
            return Ok((acc, StopFlag::Continue));
        }
        let current = Node::of_event(event, self.with_args);
        if event.port == Port::Call {
            let caller = acc.stack.last().cloned().ok_or_else(|| {
                MonitorError::MalformedTrace("call with an empty call stack".to_string())
            })?;
            acc.graph.insert(Arc {
                from: caller,
                to: current.clone(),
            });
        }
        acc.stack = update_call_stack(event.port, current, acc.stack)?;
        Ok((acc, StopFlag::Continue))
    }

    fn finish(&self, acc: &DcgAcc) -> Option<Output> {
        Some(Output::Dot(graphviz::graph_to_dot(&acc.graph, "dcg")))
    }
}

/// A proof tree. Children are in call order and never `Empty`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ProofTree {
    #[default]
    Empty,
    Node(Shared<ProofNode>),
}

#[derive(Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub predicate: Node,
    pub children: Vec<ProofTree>,
}

// Proof trees of deep recursions nest tens of thousands of levels; the
// derived drop would recurse once per level.
impl Drop for ProofNode {
    fn drop(&mut self) {
        let mut pending = std::mem::take(&mut self.children);
        while let Some(tree) = pending.pop() {
            if let ProofTree::Node(node) = tree {
                if let Ok(mut node) = Shared::try_unwrap(node) {
                    pending.append(&mut node.children);
                }
            }
        }
    }
}

impl ProofTree {
    pub fn node(predicate: Node, children: Vec<ProofTree>) -> Self {
        ProofTree::Node(Shared::new(ProofNode { predicate, children }))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ProofTree::Empty)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.preorder().len()
    }

    /// Nodes in preorder, each with its parent's preorder index.
    pub fn preorder(&self) -> Vec<(&ProofNode, Option<usize>)> {
        let mut out = Vec::new();
        let mut pending: Vec<(&ProofTree, Option<usize>)> = vec![(self, None)];
        while let Some((tree, parent)) = pending.pop() {
            if let ProofTree::Node(node) = tree {
                let index = out.len();
                out.push((&**node, parent));
                pending.extend(node.children.iter().rev().map(|c| (c, Some(index))));
            }
        }
        out
    }
}

/// Proof tree state: the children of each goal, the trees of currently
/// proven goals, and the stack of active goal ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoalTables {
    pub succ: HashMap<u64, Vec<u64>>,
    pub trees: HashMap<u64, ProofTree>,
    pub stack: Vec<u64>,
}

/// Goal id the query's top-level calls hang under.
const ROOT_GOAL: u64 = 0;

impl GoalTables {
    /// The proof of the query: the tree of its proven top-level goal, or a
    /// `<query>/0` node over several of them.
    pub fn proof_tree(&self) -> ProofTree {
        let proven: Vec<ProofTree> = self
            .succ
            .get(&ROOT_GOAL)
            .into_iter()
            .flatten()
            .filter_map(|g| self.trees.get(g).cloned())
            .collect();
        match proven.len() {
            0 => ProofTree::Empty,
            1 => proven.into_iter().next().unwrap_or_default(),
            _ => ProofTree::node(Node::root(), proven),
        }
    }
}

pub struct ProofTreeMonitor {
    with_args: bool,
}

pub fn proof_tree_monitor() -> ProofTreeMonitor {
    ProofTreeMonitor { with_args: false }
}

impl ProofTreeMonitor {
    pub fn with_args(self) -> Self {
        ProofTreeMonitor { with_args: true }
    }
}

fn pop_goal(stack: &mut Vec<u64>, event: &Event) -> Result<(), MonitorError> {
    match stack.pop() {
        Some(g) if g == event.goal_id => Ok(()),
        Some(g) => Err(MonitorError::MalformedTrace(format!(
            "{} of goal {} while goal {g} is innermost",
            event.port, event.goal_id
        ))),
        None => Err(MonitorError::MalformedTrace(format!(
            "{} of goal {} with an empty goal stack",
            event.port, event.goal_id
        ))),
    }
}

impl Monitor for ProofTreeMonitor {
    type Acc = GoalTables;

    fn name(&self) -> &str {
        "proof-tree"
    }

    fn initialize(&self) -> GoalTables {
        GoalTables::default()
    }

    fn filter(&self, event: &Event, mut t: GoalTables) -> Result<(GoalTables, StopFlag), MonitorError> {
        let g = event.goal_id;
        match event.port {
            Port::Call => {
                let parent = t.stack.last().copied().unwrap_or(ROOT_GOAL);
                t.succ.entry(parent).or_default().push(g);
                t.stack.push(g);
            }
            Port::Exit => {
                pop_goal(&mut t.stack, event)?;
                let children = t
                    .succ
                    .get(&g)
                    .into_iter()
                    .flatten()
                    .filter_map(|c| t.trees.get(c).cloned())
                    .collect();
                t.trees.insert(g, ProofTree::node(Node::of_event(event, self.with_args), children));
            }
            Port::Redo => {
                t.stack.push(g);
                t.trees.remove(&g);
            }
            Port::Fail => {
                pop_goal(&mut t.stack, event)?;
                t.trees.remove(&g);
                t.succ.remove(&g);
            }
            _ => {}
        }
        Ok((t, StopFlag::Continue))
    }

    fn finish(&self, t: &GoalTables) -> Option<Output> {
        Some(Output::Dot(graphviz::tree_to_dot(&t.proof_tree(), "proof-tree")))
    }
}

/// Names accepted by [`by_name`], in display order.
pub const MONITOR_NAMES: [&str; 7] = [
    "count-calls",
    "port-histogram",
    "depth-histogram",
    "cfg",
    "cfg-chrono",
    "dcg",
    "proof-tree",
];

/// Whether the named monitor renders to DOT rather than JSON.
pub fn renders_dot(name: &str) -> bool {
    matches!(name, "cfg" | "cfg-chrono" | "dcg" | "proof-tree")
}

/// Looks up a built-in monitor. `with_args` applies to graph and tree
/// monitors only.
pub fn by_name(name: &str, with_args: bool) -> Option<BoxedMonitor> {
    let m = match name {
        "count-calls" => BoxedMonitor::new(count_call_monitor()),
        "port-histogram" => BoxedMonitor::new(port_histogram_monitor()),
        "depth-histogram" => BoxedMonitor::new(depth_histogram_monitor()),
        "cfg" => BoxedMonitor::new(Cfg { with_args }),
        "cfg-chrono" => BoxedMonitor::new(CfgChrono { with_args }),
        "dcg" => BoxedMonitor::new(Dcg { with_args }),
        "proof-tree" => BoxedMonitor::new(ProofTreeMonitor { with_args }),
        _ => return None,
    };
    Some(m)
}
