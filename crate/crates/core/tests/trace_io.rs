use std::io::Write;

use byrdscope::corpus::{self, standard_runs};
use byrdscope::engine::{record, solve};
use byrdscope::monitors::{self, count_call_monitor, dcg_monitor, MONITOR_NAMES};
use byrdscope::trace_io::{read_trace, replay, write_trace, TraceError, TraceHeader, TraceReader, TraceWriter};
use byrdscope::trace_model::check_trace;
use byrdscope::{
    foldl_oracle, parse_program, parse_query, run_collect, EngineOptions, Event, Monitor, MonitorError, StopFlag,
};

fn all() -> EngineOptions {
    EngineOptions {
        all_solutions: true,
        ..EngineOptions::default()
    }
}

#[test]
fn queens5_round_trip_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q5.jsonl");
    let p = parse_program(corpus::QUEENS).unwrap().with_module("queens");
    let query = corpus::queens_query(5);
    let q = parse_query(&query).unwrap();
    let (_, events) = record(&p, &q, &all()).unwrap();
    write_trace(&path, &TraceHeader::new("queens", &query, &all()), &events).unwrap();

    let back = read_trace(&path).unwrap();
    assert_eq!(back, events);
    assert!(check_trace(&back).is_empty());
    for name in MONITOR_NAMES {
        let m = monitors::by_name(name, false).unwrap();
        let live = run_collect(&p, &q, &all(), &m).unwrap().result;
        assert_eq!(foldl_oracle(&back, &m).unwrap(), live, "{name}");
        assert_eq!(replay(&path, &m).unwrap(), live, "{name}");
    }
}

#[test]
fn writer_as_live_sink() {
    let dir = tempfile::tempdir().unwrap();
    for (i, run) in standard_runs().into_iter().enumerate() {
        let path = dir.path().join(format!("{i}.jsonl"));
        let (p, q, opts) = (run.program(), run.goal(), run.options(true));
        let header = TraceHeader::new(run.module, &run.query, &opts);
        let mut w = TraceWriter::create(&path, &header).unwrap();
        solve(&p, &q, &opts, &mut w).unwrap();
        w.finish().unwrap();

        let reader = TraceReader::open(&path).unwrap();
        assert_eq!(reader.header(), &header);
        let events: Vec<Event> = reader.collect::<Result<_, _>>().unwrap();
        assert!(check_trace(&events).is_empty(), "{}", run.label);
        assert_eq!(events, record(&p, &q, &opts).unwrap().1);
        let live = run_collect(&p, &q, &opts, &dcg_monitor()).unwrap().result;
        assert_eq!(replay(&path, &dcg_monitor()).unwrap(), live, "{}", run.label);
    }
}

struct StopAt(u64);

impl Monitor for StopAt {
    type Acc = u64;

    fn name(&self) -> &str {
        "stop-at"
    }

    fn initialize(&self) -> u64 {
        0
    }

    fn filter(&self, event: &Event, n: u64) -> Result<(u64, StopFlag), MonitorError> {
        let flag = if event.chrono == self.0 {
            StopFlag::Stop
        } else {
            StopFlag::Continue
        };
        Ok((n + 1, flag))
    }
}

#[test]
fn replay_truncates_on_stop_and_handles_empty_traces() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let p = parse_program("q.").unwrap();
    let (_, events) = record(&p, &parse_query("q.").unwrap(), &all()).unwrap();
    assert_eq!(events.len(), 4);
    write_trace(&path, &TraceHeader::new("q", "q.", &all()), &events).unwrap();
    assert_eq!(replay(&path, &StopAt(2)).unwrap(), 2);

    let empty = dir.path().join("empty.jsonl");
    write_trace(&empty, &TraceHeader::new("q", "true.", &all()), &[]).unwrap();
    assert_eq!(replay(&empty, &count_call_monitor()).unwrap(), 0);
}

#[test]
fn damaged_files_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let p = parse_program("q.").unwrap();
    let (_, events) = record(&p, &parse_query("q.").unwrap(), &all()).unwrap();
    write_trace(&path, &TraceHeader::new("q", "q.", &all()), &events).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let cut = &text[..text.len() - 15];
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(cut.as_bytes()).unwrap();
    drop(f);
    let err = read_trace(&path).unwrap_err();
    assert!(matches!(err, TraceError::Malformed { line: 5, .. }), "{err}");
    assert!(err.to_string().starts_with("line 5:"));
    assert!(replay(&path, &count_call_monitor()).is_err());

    let missing = read_trace(&dir.path().join("nope.jsonl")).unwrap_err();
    assert!(matches!(missing, TraceError::Open { .. }));
}

#[test]
fn monitor_failures_during_replay_carry_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    let p = parse_program("q.").unwrap();
    let (_, mut events) = record(&p, &parse_query("q.").unwrap(), &all()).unwrap();
    events.remove(0);
    write_trace(&path, &TraceHeader::new("q", "q.", &all()), &events).unwrap();
    let err = replay(&path, &monitors::proof_tree_monitor()).unwrap_err();
    assert!(matches!(err, TraceError::Monitor { line: 2, .. }), "{err}");
}
