use byrdscope::corpus;
use byrdscope::engine::{record, solve, solve_untraced, EngineOptions, StopFlag};
use byrdscope::lang::{parse_program, parse_query, PredKey, Term};
use byrdscope::trace_model::{check_trace, check_trace_with, CheckOptions, Event, Port};
use byrdscope::EngineError;

/// Independent board checker: a permutation is a solution when no two
/// queens share a diagonal.
fn safe_board(rows: &[i64]) -> bool {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if (rows[i] - rows[j]).abs() == (j - i) as i64 {
                return false;
            }
        }
    }
    true
}

fn permutations(items: &[i64]) -> Vec<Vec<i64>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn queens_oracle(n: i64) -> Vec<Vec<i64>> {
    let board: Vec<i64> = (1..=n).collect();
    permutations(&board).into_iter().filter(|p| safe_board(p)).collect()
}

fn list_ints(t: &Term) -> Vec<i64> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Compound(f, args) if f == "." => {
                match &args[0] {
                    Term::Int(i) => out.push(*i),
                    other => panic!("non-integer element {other:?}"),
                }
                cur = &args[1];
            }
            Term::Atom(a) if a == "[]" => return out,
            other => panic!("not a list: {other:?}"),
        }
    }
}

fn ports(events: &[Event]) -> Vec<(Port, String)> {
    events.iter().map(|e| (e.port, e.predicate.canonical())).collect()
}

fn all() -> EngineOptions {
    EngineOptions {
        all_solutions: true,
        ..EngineOptions::default()
    }
}

#[test]
fn single_fact_all_solutions() {
    let p = parse_program("q.").unwrap();
    let (outcome, events) = record(&p, &parse_query("q.").unwrap(), &all()).unwrap();
    assert_eq!(
        ports(&events),
        [
            (Port::Call, "q/0".to_string()),
            (Port::Exit, "q/0".to_string()),
            (Port::Redo, "q/0".to_string()),
            (Port::Fail, "q/0".to_string()),
        ]
    );
    assert_eq!(outcome.solutions.len(), 1);
    assert_eq!(outcome.events_emitted, 4);
    assert!(!outcome.stopped_early);
    assert!(check_trace(&events).is_empty());
    assert!(events.iter().all(|e| e.goal_id == 1 && e.depth == 1));
    assert_eq!(events.iter().map(|e| e.chrono).collect::<Vec<_>>(), [1, 2, 3, 4]);
}

#[test]
fn builtin_fail_emits_nothing() {
    let p = parse_program("p :- fail.").unwrap();
    let (outcome, events) = record(&p, &parse_query("p.").unwrap(), &all()).unwrap();
    assert_eq!(
        ports(&events),
        [(Port::Call, "p/0".to_string()), (Port::Fail, "p/0".to_string())]
    );
    assert!(outcome.solutions.is_empty());
}

#[test]
fn first_solution_stops_without_redo() {
    let p = parse_program("q.").unwrap();
    let (outcome, events) = record(&p, &parse_query("q.").unwrap(), &EngineOptions::default()).unwrap();
    assert_eq!(events.len(), 2);
    assert_eq!(outcome.solutions.len(), 1);
    assert!(!outcome.stopped_early);
    assert!(check_trace(&events).is_empty());
}

#[test]
fn queens5_first_solution_is_valid() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let (outcome, events) = record(&p, &parse_query(&corpus::queens_query(5)).unwrap(), &EngineOptions::default()).unwrap();
    assert_eq!(outcome.solutions.len(), 1);
    let out = list_ints(&outcome.solutions[0]["Out"]);
    let mut sorted = out.clone();
    sorted.sort();
    assert_eq!(sorted, [1, 2, 3, 4, 5]);
    assert!(safe_board(&out));
    assert!(check_trace(&events).is_empty());
}

#[test]
fn queens_solution_sets_match_oracle() {
    let p = parse_program(corpus::QUEENS).unwrap();
    for n in 4..=6 {
        let q = parse_query(&corpus::queens_query(n as u32)).unwrap();
        let outcome = solve_untraced(&p, &q, &all()).unwrap();
        let mut got: Vec<Vec<i64>> = outcome.solutions.iter().map(|s| list_ints(&s["Out"])).collect();
        got.sort();
        let mut want = queens_oracle(n);
        want.sort();
        assert_eq!(got, want, "n = {n}");
    }
    // Engine order is the permutation order of qperm; the first solution is the
    // first safe permutation the oracle yields in lexicographic order.
    assert_eq!(queens_oracle(5).len(), 10);
}

#[test]
fn tracing_never_changes_solutions() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let q = parse_query(&corpus::queens_query(5)).unwrap();
    let untraced = solve_untraced(&p, &q, &all()).unwrap();
    let mut count = 0u64;
    let traced = solve(&p, &q, &all(), &mut |_: &Event| {
        count += 1;
        StopFlag::Continue
    })
    .unwrap();
    assert_eq!(untraced.solutions, traced.solutions);
    assert_eq!(traced.events_emitted, count);
    assert_eq!(untraced.events_emitted, 0);
}

#[test]
fn root_exit_count_equals_solution_count() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let q = parse_query(&corpus::queens_query(6)).unwrap();
    let (outcome, events) = record(&p, &q, &all()).unwrap();
    let root_exits = events.iter().filter(|e| e.depth == 1 && e.port == Port::Exit).count();
    assert_eq!(root_exits, outcome.solutions.len());
    assert_eq!(root_exits, 4);
}

fn corpus_runs() -> Vec<(&'static str, String)> {
    let mut runs = vec![
        (corpus::QUEENS, "main.".to_string()),
        (corpus::LISTS, "append(X, Y, [1,2,3]).".to_string()),
        (corpus::LISTS, "member(X, [a,b,c]).".to_string()),
        (corpus::LISTS, "common(X, [1,2,3,4], [4,3,9]).".to_string()),
        (corpus::LISTS, "len([a,b,c], N).".to_string()),
        (corpus::FAILING, "unreachable.".to_string()),
    ];
    for n in 4..=5 {
        runs.push((corpus::QUEENS, corpus::queens_query(n)));
    }
    runs
}

#[test]
fn corpus_traces_are_well_formed() {
    for (src, query) in corpus_runs() {
        let p = parse_program(src).unwrap();
        let q = parse_query(&query).unwrap();
        for all_solutions in [false, true] {
            for internal in [false, true] {
                let opts = EngineOptions {
                    all_solutions,
                    emit_internal_events: internal,
                    ..EngineOptions::default()
                };
                let (_, events) = record(&p, &q, &opts).unwrap();
                let diags = check_trace(&events);
                assert!(diags.is_empty(), "{query} {opts:?}: {diags:?}");
                if !internal {
                    assert!(events.iter().all(|e| e.is_external()));
                }
            }
        }
    }
}

#[test]
fn external_only_trace_is_renumbered_projection() {
    for (src, query) in corpus_runs() {
        let p = parse_program(src).unwrap();
        let q = parse_query(&query).unwrap();
        let with = EngineOptions {
            all_solutions: true,
            ..EngineOptions::default()
        };
        let without = EngineOptions {
            emit_internal_events: false,
            ..with.clone()
        };
        let (_, full) = record(&p, &q, &with).unwrap();
        let (_, ext) = record(&p, &q, &without).unwrap();
        let projected: Vec<Event> = full
            .into_iter()
            .filter(|e| e.is_external())
            .enumerate()
            .map(|(i, mut e)| {
                e.chrono = i as u64 + 1;
                e
            })
            .collect();
        assert_eq!(projected, ext, "{query}");
    }
}

#[test]
fn internal_events_carry_goal_paths() {
    let p = parse_program("a. b. c.\np :- a, (b ; c).\nr :- ( a -> b ; c ).\ns :- ( fail -> a ; c ).").unwrap();
    let (_, events) = record(&p, &parse_query("p.").unwrap(), &all()).unwrap();
    let internal: Vec<(u64, String, u64)> = events
        .iter()
        .filter(|e| !e.is_external())
        .map(|e| (e.chrono, e.goal_path.as_ref().unwrap().to_string(), e.goal_id))
        .collect();
    let p_goal = events[0].goal_id;
    assert_eq!(internal.len(), 2);
    assert_eq!(internal[0].1, "[c2;d1]");
    assert_eq!(internal[1].1, "[c2;d2]");
    assert!(internal.iter().all(|(_, _, g)| *g == p_goal));
    assert!(events.iter().filter(|e| !e.is_external()).all(|e| e.depth == 1 && e.predicate.canonical() == "p/0"));

    let (_, events) = record(&p, &parse_query("r.").unwrap(), &all()).unwrap();
    let internal: Vec<String> = events.iter().filter(|e| !e.is_external()).map(|e| format!("{} {}", e.port, e.goal_path.as_ref().unwrap())).collect();
    assert_eq!(internal, ["then [t]"]);
    // The committed condition is never redone.
    assert!(!events.iter().any(|e| e.port == Port::Redo && e.predicate.canonical() == "a/0"));
    assert!(check_trace(&events).is_empty());

    let (_, events) = record(&p, &parse_query("s.").unwrap(), &all()).unwrap();
    let internal: Vec<String> = events.iter().filter(|e| !e.is_external()).map(|e| format!("{} {}", e.port, e.goal_path.as_ref().unwrap())).collect();
    assert_eq!(internal, ["else [e]"]);
}

#[test]
fn query_level_constructs_emit_no_internal_events() {
    let p = parse_program("a. b.").unwrap();
    let (outcome, events) = record(&p, &parse_query("(a ; b).").unwrap(), &all()).unwrap();
    assert_eq!(outcome.solutions.len(), 2);
    assert!(events.iter().all(|e| e.is_external()));
}

#[test]
fn max_events_truncates() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let q = parse_query("main.").unwrap();
    let opts = EngineOptions {
        max_events: Some(10),
        ..EngineOptions::default()
    };
    let (outcome, events) = record(&p, &q, &opts).unwrap();
    assert_eq!(events.len(), 10);
    assert!(outcome.stopped_early);
    assert!(check_trace_with(&events, CheckOptions { complete: false }).is_empty());

    let p = parse_program("q.").unwrap();
    let opts = EngineOptions {
        max_events: Some(2),
        ..EngineOptions::default()
    };
    let (outcome, _) = record(&p, &parse_query("q.").unwrap(), &opts).unwrap();
    assert!(!outcome.stopped_early, "run that fits exactly is not truncated");
}

#[test]
fn sink_stop_unwinds_immediately() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let q = parse_query("main.").unwrap();
    let mut seen = 0;
    let outcome = solve(&p, &q, &all(), &mut |_: &Event| {
        seen += 1;
        if seen == 3 {
            StopFlag::Stop
        } else {
            StopFlag::Continue
        }
    })
    .unwrap();
    assert_eq!(seen, 3);
    assert_eq!(outcome.events_emitted, 3);
    assert!(outcome.stopped_early);
}

#[test]
fn solutions_found_before_stop_are_kept() {
    let p = parse_program("q(1). q(2). q(3).").unwrap();
    let q = parse_query("q(X).").unwrap();
    let mut exits = 0;
    let outcome = solve(&p, &q, &all(), &mut |e: &Event| {
        if e.port == Port::Exit {
            exits += 1;
        }
        if exits == 2 {
            StopFlag::Stop
        } else {
            StopFlag::Continue
        }
    })
    .unwrap();
    assert!(outcome.stopped_early);
    assert_eq!(outcome.solutions.len(), 1);
    assert_eq!(outcome.solutions[0]["X"], Term::Int(1));
}

#[test]
fn capture_args_reports_bindings_per_port() {
    let p = parse_program("q(1). q(2).").unwrap();
    let opts = EngineOptions {
        capture_args: true,
        all_solutions: true,
        ..EngineOptions::default()
    };
    let (_, events) = record(&p, &parse_query("q(X).").unwrap(), &opts).unwrap();
    let args: Vec<String> = events
        .iter()
        .map(|e| format!("{} {}", e.port, e.args.as_ref().unwrap().join(",")))
        .collect();
    assert_eq!(args[0].split(' ').next(), Some("call"));
    assert!(args[0].ends_with("_G0"));
    assert_eq!(args[1], "exit 1");
    assert_eq!(args[2], "redo 1");
    assert_eq!(args[3], "exit 2");
    assert_eq!(events.last().unwrap().port, Port::Fail);

    let (_, events) = record(&p, &parse_query("q(X).").unwrap(), &all()).unwrap();
    assert!(events.iter().all(|e| e.args.is_none()));
}

#[test]
fn determinism_pragmas_reach_events() {
    let p = parse_program(corpus::QUEENS).unwrap();
    let (_, events) = record(&p, &parse_query("main.").unwrap(), &EngineOptions::default()).unwrap();
    let main = events.iter().find(|e| e.predicate.canonical() == "main/0").unwrap();
    assert_eq!(main.determinism.as_str(), "cc_multi");
    assert_eq!(&*main.predicate.module, "user");
}

#[test]
fn engine_errors() {
    let p = parse_program("p :- q.").unwrap();
    assert_eq!(
        solve_untraced(&p, &parse_query("p.").unwrap(), &all()),
        Err(EngineError::UndefinedPredicate(PredKey::new("q", 0)))
    );
    assert_eq!(
        solve_untraced(&p, &parse_query("X is Y + 1.").unwrap(), &all()),
        Err(EngineError::UnboundArithmetic)
    );
    assert!(matches!(
        solve_untraced(&p, &parse_query("X is foo + 1.").unwrap(), &all()),
        Err(EngineError::NonIntegerOperand(_))
    ));
    assert_eq!(
        solve_untraced(&p, &parse_query("X is 1 // 0.").unwrap(), &all()),
        Err(EngineError::DivisionByZero)
    );
}

#[test]
fn deep_recursion_does_not_overflow() {
    let p = parse_program("count(0).\ncount(N) :- N > 0, M is N - 1, count(M).").unwrap();
    let q = parse_query("count(50000).").unwrap();
    let (outcome, events) = record(&p, &q, &all()).unwrap();
    assert_eq!(outcome.solutions.len(), 1);
    assert_eq!(events.iter().map(|e| e.depth).max(), Some(50_001));
    assert!(check_trace(&events).is_empty());
}

#[test]
fn lists_corpus_answers() {
    let p = parse_program(corpus::LISTS).unwrap();
    let outcome = solve_untraced(&p, &parse_query("append(X, Y, [1,2,3]).").unwrap(), &all()).unwrap();
    assert_eq!(outcome.solutions.len(), 4);
    let outcome = solve_untraced(&p, &parse_query("common(X, [1,2,3,4], [4,3,9]).").unwrap(), &all()).unwrap();
    let xs: Vec<Term> = outcome.solutions.iter().map(|s| s["X"].clone()).collect();
    assert_eq!(xs, [Term::Int(3), Term::Int(4)]);
    let p = parse_program(corpus::FAILING).unwrap();
    assert!(solve_untraced(&p, &parse_query("unreachable.").unwrap(), &all()).unwrap().solutions.is_empty());
}
