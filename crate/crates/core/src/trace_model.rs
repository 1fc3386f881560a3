//! Event schema for Byrd-box execution traces.
//!
//! An [`Event`] carries the control-flow attributes (chrono, goal invocation
//! number, depth, port, determinism, procedure), the optional data-flow
//! attribute (rendered arguments) and the optional source attribute (goal
//! path). `local_vars` and `ancestors` exist in the schema but no producer in
//! this crate fills them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// The eight event ports: Byrd's four plus the four internal ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Call,
    Exit,
    Fail,
    Redo,
    Disj,
    Switch,
    Then,
    Else,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PortClass {
    External,
    Internal,
}

impl Port {
    pub const ALL: [Port; 8] = [
        Port::Call,
        Port::Exit,
        Port::Fail,
        Port::Redo,
        Port::Disj,
        Port::Switch,
        Port::Then,
        Port::Else,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Port::Call => "call",
            Port::Exit => "exit",
            Port::Fail => "fail",
            Port::Redo => "redo",
            Port::Disj => "disj",
            Port::Switch => "switch",
            Port::Then => "then",
            Port::Else => "else",
        }
    }

    pub fn is_external(self) -> bool {
        classify_port(self) == PortClass::External
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// call/exit/fail/redo are external, everything else is internal.
pub fn classify_port(port: Port) -> PortClass {
    match port {
        Port::Call | Port::Exit | Port::Fail | Port::Redo => PortClass::External,
        Port::Disj | Port::Switch | Port::Then | Port::Else => PortClass::Internal,
    }
}

/// Determinism marker attached to a procedure. Display metadata only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Determinism {
    Det,
    Semidet,
    Nondet,
    Multi,
    CcMulti,
    CcNondet,
    Failure,
    #[default]
    Unknown,
}

impl Determinism {
    pub fn as_str(self) -> &'static str {
        match self {
            Determinism::Det => "det",
            Determinism::Semidet => "semidet",
            Determinism::Nondet => "nondet",
            Determinism::Multi => "multi",
            Determinism::CcMulti => "cc_multi",
            Determinism::CcNondet => "cc_nondet",
            Determinism::Failure => "failure",
            Determinism::Unknown => "unknown",
        }
    }
}

impl FromStr for Determinism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "det" => Determinism::Det,
            "semidet" => Determinism::Semidet,
            "nondet" => Determinism::Nondet,
            "multi" => Determinism::Multi,
            "cc_multi" => Determinism::CcMulti,
            "cc_nondet" => Determinism::CcNondet,
            "failure" | "erroneous" => Determinism::Failure,
            "unknown" => Determinism::Unknown,
            other => return Err(format!("unknown determinism `{other}`")),
        })
    }
}

impl fmt::Display for Determinism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcType {
    #[default]
    Predicate,
    Function,
}

/// Procedure identity. Names are reference counted so events clone cheaply.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub module: Arc<str>,
    pub name: Arc<str>,
    pub arity: u32,
    pub mode_num: u32,
    pub proc_type: ProcType,
}

impl Predicate {
    pub fn new(module: &str, name: &str, arity: u32) -> Self {
        Predicate {
            module: module.into(),
            name: name.into(),
            arity,
            mode_num: 0,
            proc_type: ProcType::Predicate,
        }
    }

    /// The synthetic predicate the engine runs a query under.
    pub fn query_root(module: &str) -> Self {
        Predicate::new(module, QUERY_ROOT_NAME, 0)
    }

    /// `name/arity`, the label used for graph and tree nodes.
    pub fn canonical(&self) -> String {
        format!("{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub const QUERY_ROOT_NAME: &str = "<query>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathStep {
    Conj(u32),
    Disj(u32),
    Then,
    Else,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::Conj(i) => write!(f, "c{i}"),
            PathStep::Disj(i) => write!(f, "d{i}"),
            PathStep::Then => f.write_str("t"),
            PathStep::Else => f.write_str("e"),
        }
    }
}

/// Position of an internal event inside its clause body.
///
/// Steps are held outermost first, so `[c3;e;d1]` is a first disjunct inside
/// an else branch inside the third conjunct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoalPath {
    steps: Vec<PathStep>,
}

impl GoalPath {
    pub fn new() -> Self {
        GoalPath::default()
    }

    pub fn from_outermost(steps: Vec<PathStep>) -> Self {
        GoalPath { steps }
    }

    pub fn from_innermost(mut steps: Vec<PathStep>) -> Self {
        steps.reverse();
        GoalPath { steps }
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn child(&self, step: PathStep) -> GoalPath {
        let mut steps = Vec::with_capacity(self.steps.len() + 1);
        steps.extend_from_slice(&self.steps);
        steps.push(step);
        GoalPath { steps }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn render_goal_path(path: &GoalPath) -> String {
    path.to_string()
}

impl fmt::Display for GoalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{step}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for GoalPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| format!("goal path `{s}` is not bracketed"))?;
        if inner.is_empty() {
            return Ok(GoalPath::new());
        }
        let steps = inner
            .split(';')
            .map(|tok| {
                let index = |rest: &str| {
                    rest.parse::<u32>()
                        .ok()
                        .filter(|i| *i >= 1)
                        .ok_or_else(|| format!("bad goal path step `{tok}`"))
                };
                match tok {
                    "t" => Ok(PathStep::Then),
                    "e" => Ok(PathStep::Else),
                    _ if tok.starts_with('c') => index(&tok[1..]).map(PathStep::Conj),
                    _ if tok.starts_with('d') => index(&tok[1..]).map(PathStep::Disj),
                    _ => Err(format!("bad goal path step `{tok}`")),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GoalPath { steps })
    }
}

/// One trace event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub chrono: u64,
    pub goal_id: u64,
    pub depth: u32,
    pub port: Port,
    pub determinism: Determinism,
    pub predicate: Predicate,
    pub args: Option<Vec<String>>,
    pub goal_path: Option<GoalPath>,
    pub local_vars: Option<Vec<String>>,
    pub ancestors: Option<Vec<u64>>,
}

impl Event {
    pub fn is_external(&self) -> bool {
        self.port.is_external()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDiagnostic {
    pub chrono: u64,
    pub rule: String,
    pub description: String,
}

impl fmt::Display for TraceDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}: [{}] {}", self.chrono, self.rule, self.description)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// When false the trace may stop mid-execution and a non-empty stack at
    /// the end is not reported.
    pub complete: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { complete: true }
    }
}

/// Checks a complete trace against the Byrd-box discipline.
pub fn check_trace<'a, I>(events: I) -> Vec<TraceDiagnostic>
where
    I: IntoIterator<Item = &'a Event>,
{
    check_trace_with(events, CheckOptions::default())
}

pub fn check_trace_with<'a, I>(events: I, options: CheckOptions) -> Vec<TraceDiagnostic>
where
    I: IntoIterator<Item = &'a Event>,
{
    struct Active {
        goal_id: u64,
        depth: u32,
        predicate: Predicate,
    }

    let mut out = Vec::new();
    let mut diag = |chrono: u64, rule: &str, description: String| {
        out.push(TraceDiagnostic {
            chrono,
            rule: rule.to_string(),
            description,
        })
    };
    let mut stack: Vec<Active> = Vec::new();
    let mut exited: HashSet<u64> = HashSet::new();
    let mut expected_chrono = 1u64;
    let mut last_chrono = 0u64;

    for ev in events {
        last_chrono = ev.chrono;
        if ev.chrono != expected_chrono {
            diag(
                ev.chrono,
                "a",
                format!("expected chrono {expected_chrono}, found {}", ev.chrono),
            );
        }
        expected_chrono = ev.chrono.saturating_add(1);

        let internal = !ev.is_external();
        if !internal && ev.goal_path.is_some() {
            diag(
                ev.chrono,
                "f",
                format!("goal_path present on external {} event", ev.port),
            );
        }

        match ev.port {
            Port::Call => {
                let parent_depth = stack.last().map_or(0, |a| a.depth);
                if ev.depth != parent_depth + 1 {
                    diag(
                        ev.chrono,
                        "e",
                        format!(
                            "call depth {} but enclosing call has depth {parent_depth}",
                            ev.depth
                        ),
                    );
                }
                stack.push(Active {
                    goal_id: ev.goal_id,
                    depth: ev.depth,
                    predicate: ev.predicate.clone(),
                });
            }
            Port::Redo => {
                if !exited.remove(&ev.goal_id) {
                    diag(
                        ev.chrono,
                        "d",
                        format!("redo of goal {} which has not exited", ev.goal_id),
                    );
                }
                stack.push(Active {
                    goal_id: ev.goal_id,
                    depth: ev.depth,
                    predicate: ev.predicate.clone(),
                });
            }
            Port::Exit | Port::Fail => match stack.pop() {
                None => diag(
                    ev.chrono,
                    "b",
                    format!("{} of {} pops an empty call stack", ev.port, ev.predicate),
                ),
                Some(top) => {
                    if top.predicate != ev.predicate {
                        diag(
                            ev.chrono,
                            "c",
                            format!(
                                "{} of {} does not match active call of {}",
                                ev.port, ev.predicate, top.predicate
                            ),
                        );
                    }
                    if ev.port == Port::Exit {
                        exited.insert(top.goal_id);
                    } else {
                        exited.remove(&top.goal_id);
                    }
                }
            },
            Port::Disj | Port::Switch | Port::Then | Port::Else => {}
        }
    }

    if options.complete && !stack.is_empty() {
        let open: Vec<String> = stack.iter().map(|a| a.predicate.canonical()).collect();
        diag(
            last_chrono,
            "b",
            format!("trace ends with open calls: {}", open.join(", ")),
        );
    }
    out
}
