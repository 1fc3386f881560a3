use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use byrdscope::collect::{CollectSession, ErasedAcc, Merged, SessionState};
use byrdscope::engine::solve;
use byrdscope::monitors::{self, renders_dot};
use byrdscope::trace_io::{self, TraceHeader, TraceReader, TraceWriter};
use byrdscope::trace_model::{check_trace_with, CheckOptions};
use byrdscope::{merge, parse_program, parse_query, run_collect, EngineOptions, Event, Goal, Output, Program};
use serde_json::{Map, Value};

use crate::args::{CheckArgs, ExecArgs, MonitorArgs, ReplayArgs, RunArgs, TraceArgs};
use crate::report::{self, Failure};

type CmdResult = Result<ExitCode, Failure>;

fn load(exec: &ExecArgs) -> Result<(Program, Goal, String), Failure> {
    let path = &exec.program;
    let source = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let module = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "user".to_string());
    let program = parse_program(&source)
        .map(|p| p.with_module(&module))
        .with_context(|| path.display().to_string())?;
    let query = parse_query(&exec.query).with_context(|| format!("query `{}`", exec.query))?;
    Ok((program, query, module))
}

fn engine_options(exec: &ExecArgs) -> EngineOptions {
    EngineOptions {
        emit_internal_events: exec.internal_events,
        capture_args: exec.args,
        all_solutions: exec.all_solutions,
        max_events: exec.max_events,
    }
}

fn build_monitors(names: &[String], with_args: bool) -> Result<Merged, Failure> {
    let mut parts = Vec::with_capacity(names.len());
    for name in names {
        let m = monitors::by_name(name, with_args).ok_or_else(|| Failure::Usage(format!("unknown monitor: {name}")))?;
        parts.push(m);
    }
    merge(parts).map_err(|e| Failure::Usage(e.to_string()))
}

/// Rejects duplicate monitors and graph monitors without a DOT path before
/// anything runs.
fn validate(output: &MonitorArgs) -> Result<(), Failure> {
    for (i, name) in output.monitors.iter().enumerate() {
        if output.monitors[..i].contains(name) {
            return Err(Failure::Usage(format!("monitor {name} given more than once")));
        }
        if renders_dot(name) && output.dot.is_none() {
            return Err(Failure::Usage(format!("monitor {name} renders a graph; pass --dot <PATH>")));
        }
    }
    Ok(())
}

/// `out.dot` becomes `out.cfg.dot` for monitor `cfg`.
fn dot_path_for(base: &Path, monitor: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{monitor}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{monitor}"),
    };
    base.with_file_name(name)
}

fn json_of(results: &[(String, Option<Output>)]) -> Option<Value> {
    let json: Vec<(&String, &Value)> = results
        .iter()
        .filter_map(|(n, o)| match o {
            Some(Output::Json(v)) => Some((n, v)),
            _ => None,
        })
        .collect();
    match json.as_slice() {
        [] => None,
        [(_, v)] => Some((*v).clone()),
        many => Some(Value::Object(many.iter().map(|(n, v)| ((*n).clone(), (*v).clone())).collect())),
    }
}

fn write_results(merged: &Merged, accs: &[ErasedAcc], output: &MonitorArgs) -> Result<(), Failure> {
    let results = merged.finish_each(accs);
    if let Some(json) = json_of(&results) {
        let text = format!("{json}\n");
        match &output.out {
            Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
            None => io::stdout().write_all(text.as_bytes()).context("cannot write to stdout")?,
        }
    }
    let dots: Vec<(&String, &String)> = results
        .iter()
        .filter_map(|(n, o)| match o {
            Some(Output::Dot(d)) => Some((n, d)),
            _ => None,
        })
        .collect();
    if let Some(base) = &output.dot {
        for (name, doc) in &dots {
            let path = if dots.len() == 1 { base.clone() } else { dot_path_for(base, name) };
            fs::write(&path, doc).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}

fn snapshot_line(merged: &Merged, index: u64, events: u64, accs: &[ErasedAcc]) -> String {
    let mut results = Map::new();
    for (name, out) in merged.finish_each(accs) {
        let value = match out {
            Some(Output::Json(v)) => v,
            Some(Output::Dot(d)) => Value::String(d),
            None => Value::Null,
        };
        results.insert(name, value);
    }
    let mut line = Map::new();
    line.insert("checkpoint".into(), index.into());
    line.insert("events".into(), events.into());
    line.insert("results".into(), Value::Object(results));
    Value::Object(line).to_string()
}

fn note_stop(stopped_early: bool, events: u64) {
    if stopped_early {
        report::warning(crate::color_enabled(), &format!("execution stopped after {events} events"));
    }
}

pub fn run(a: &RunArgs) -> CmdResult {
    validate(&a.output)?;
    let (program, query, _) = load(&a.exec)?;
    let options = engine_options(&a.exec);
    let merged = build_monitors(&a.output.monitors, a.exec.args)?;

    let (accs, stopped_early, events) = match a.checkpoint_every {
        None => {
            let out = run_collect(&program, &query, &options, &merged).map_err(anyhow::Error::from)?;
            (out.result, out.stopped_early, out.events)
        }
        Some(every_n) => {
            let worker = build_monitors(&a.output.monitors, a.exec.args)?;
            let mut session =
                CollectSession::new(&program, &query, &options, worker, every_n).map_err(anyhow::Error::from)?;
            let mut index = 0;
            loop {
                match session.resume().map_err(anyhow::Error::from)? {
                    SessionState::Suspended { events } => {
                        index += 1;
                        let accs = session.accumulator().expect("suspended session holds the accumulator");
                        eprintln!("{}", snapshot_line(&merged, index, events, accs));
                    }
                    SessionState::Finished(out) => break (out.result, out.stopped_early, out.events),
                }
            }
        }
    };
    note_stop(stopped_early, events);
    write_results(&merged, &accs, &a.output)?;
    Ok(ExitCode::SUCCESS)
}

pub fn trace(a: &TraceArgs) -> CmdResult {
    let (program, query, module) = load(&a.exec)?;
    let options = engine_options(&a.exec);
    let header = TraceHeader::new(&module, &a.exec.query, &options);
    let out: Box<dyn Write> = match &a.output {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let mut writer = TraceWriter::new(out, &header).context("cannot write trace header")?;
    let outcome = solve(&program, &query, &options, &mut writer).map_err(anyhow::Error::from)?;
    writer.finish().map_err(anyhow::Error::from)?;
    // A write failure also stops the engine; only report a real early stop.
    note_stop(outcome.stopped_early, outcome.events_emitted);
    if let Some(path) = &a.output {
        eprintln!("wrote {} events to {}", outcome.events_emitted, path.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn replay(a: &ReplayArgs) -> CmdResult {
    validate(&a.output)?;
    let merged = build_monitors(&a.output.monitors, a.args)?;
    let accs = trace_io::replay(&a.trace, &merged).with_context(|| a.trace.display().to_string())?;
    write_results(&merged, &accs, &a.output)?;
    Ok(ExitCode::SUCCESS)
}

pub fn check(a: &CheckArgs) -> CmdResult {
    let reader = TraceReader::open(&a.trace).with_context(|| a.trace.display().to_string())?;
    let events: Vec<Event> = reader
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!(e).context(a.trace.display().to_string()))?;
    let diagnostics = check_trace_with(&events, CheckOptions { complete: !a.partial });
    if diagnostics.is_empty() {
        println!("ok: {} events", events.len());
        return Ok(ExitCode::SUCCESS);
    }
    let mut stderr = io::stderr().lock();
    for d in &diagnostics {
        let _ = writeln!(stderr, "{d}");
    }
    let _ = writeln!(stderr, "{} problem(s) in {} events", diagnostics.len(), events.len());
    Ok(ExitCode::from(1))
}
