//! Depth-first backtracking interpreter that reports every procedure-box
//! transition to an [`EventSink`].
//!
//! The engine calls the sink synchronously for each event and only resumes
//! execution once the sink returns. A [`StopFlag::Stop`] reply unwinds the
//! run at once without emitting anything further.

mod machine;
mod store;
mod subst;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lang::{Goal, PredKey, Program, Term};
use crate::trace_model::Event;

pub use subst::{eval_builtin, unify, BuiltinOutcome, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopFlag {
    Stop,
    Continue,
}

/// Consumer of the event stream.
pub trait EventSink {
    fn on_event(&mut self, event: &Event) -> StopFlag;
}

impl<F> EventSink for F
where
    F: FnMut(&Event) -> StopFlag,
{
    fn on_event(&mut self, event: &Event) -> StopFlag {
        self(event)
    }
}

/// Materializes the whole trace.
impl EventSink for Vec<Event> {
    fn on_event(&mut self, event: &Event) -> StopFlag {
        self.push(event.clone());
        StopFlag::Continue
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// Emit disj/then/else events in addition to the four Byrd ports.
    pub emit_internal_events: bool,
    /// Attach rendered arguments to external events.
    pub capture_args: bool,
    /// Backtrack through every solution instead of stopping at the first.
    pub all_solutions: bool,
    pub max_events: Option<u64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            emit_internal_events: true,
            capture_args: false,
            all_solutions: false,
            max_events: None,
        }
    }
}

/// Bindings of the query's named variables for one solution.
pub type Solution = BTreeMap<String, Term>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub solutions: Vec<Solution>,
    pub stopped_early: bool,
    pub events_emitted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("undefined predicate {0}")]
    UndefinedPredicate(PredKey),
    #[error("unbound arithmetic operand")]
    UnboundArithmetic,
    #[error("non-integer arithmetic operand: {0}")]
    NonIntegerOperand(String),
    #[error("integer overflow in {0}")]
    ArithmeticOverflow(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Runs `query` against `program`, reporting each event to `sink`.
pub fn solve(
    program: &Program,
    query: &Goal,
    options: &EngineOptions,
    sink: &mut dyn EventSink,
) -> Result<RunOutcome, EngineError> {
    machine::run(program, query, options, Some(sink))
}

/// Runs without constructing any events. Solutions match [`solve`].
pub fn solve_untraced(
    program: &Program,
    query: &Goal,
    options: &EngineOptions,
) -> Result<RunOutcome, EngineError> {
    machine::run(program, query, options, None)
}

/// Convenience wrapper returning the full event sequence.
pub fn record(
    program: &Program,
    query: &Goal,
    options: &EngineOptions,
) -> Result<(RunOutcome, Vec<Event>), EngineError> {
    let mut events = Vec::new();
    let outcome = solve(program, query, options, &mut events)?;
    Ok((outcome, events))
}
