//! Byrd-box execution tracing for a small logic language, with monitors
//! that fold over the event stream as the program runs.
//!
//! A [`Monitor`] is an initial accumulator plus a filter step. The engine
//! hands each event to the monitor as it happens, so analyses such as call
//! counting, control flow graphs, dynamic call graphs and proof trees are
//! computed without ever storing the trace.

pub mod collect;
pub mod corpus;
pub mod engine;
pub mod graphviz;
pub mod lang;
pub mod monitors;
pub mod trace_io;
pub mod trace_model;

pub use collect::{
    foldl_oracle, merge, run_collect, BoxedMonitor, CollectError, CollectOutcome, Monitor, MonitorError, Output,
};
pub use engine::{EngineError, EngineOptions, EventSink, RunOutcome, StopFlag};
pub use lang::{parse_program, parse_query, Goal, LangError, Program, Term};
pub use trace_model::{Event, Port, Predicate};
