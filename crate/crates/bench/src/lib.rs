//! Workloads shared by the tracing benchmarks.

use byrdscope::corpus;
use byrdscope::{parse_program, parse_query, EngineOptions, Goal, Program};

/// The queens program and the all-solutions query for an `n` board.
pub fn queens(n: u32) -> (Program, Goal) {
    let program = parse_program(corpus::QUEENS).expect("corpus parses").with_module("queens");
    let query = parse_query(&corpus::queens_query(n)).expect("query parses");
    (program, query)
}

pub fn options(internal: bool) -> EngineOptions {
    EngineOptions {
        emit_internal_events: internal,
        all_solutions: true,
        ..EngineOptions::default()
    }
}
