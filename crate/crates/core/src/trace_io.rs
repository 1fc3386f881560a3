//! Trace files: a header line followed by one JSON event record per line.
//!
//! ```text
//! {"format":"byrdscope-trace","version":"1.0","program":"q","query":"q.","options":{...}}
//! {"chrono":1,"goal_id":1,"depth":1,"port":"call","determinism":"unknown","module":"q","name":"q","arity":0,"mode_num":0,"proc_type":"predicate"}
//! ```
//!
//! Optional attributes are left out of a record when absent. Readers refuse
//! files whose major version they do not know.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collect::{Monitor, MonitorError, StopFlag};
use crate::engine::{EngineOptions, EventSink};
use crate::trace_model::{Determinism, Event, GoalPath, Port, Predicate, ProcType};

pub const FORMAT_NAME: &str = "byrdscope-trace";
pub const FORMAT_VERSION: &str = "1.0";
const SUPPORTED_MAJOR: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Open { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported trace format version {found} (this reader handles {FORMAT_VERSION})")]
    UnsupportedVersion { found: String },
    #[error("line {line}: monitor failed: {source}")]
    Monitor { line: usize, source: MonitorError },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub internal_events: bool,
    pub capture_args: bool,
    pub all_solutions: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_events: Option<u64>,
}

impl From<&EngineOptions> for TraceOptions {
    fn from(o: &EngineOptions) -> Self {
        TraceOptions {
            internal_events: o.emit_internal_events,
            capture_args: o.capture_args,
            all_solutions: o.all_solutions,
            max_events: o.max_events,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub version: String,
    pub program: String,
    pub query: String,
    pub options: TraceOptions,
}

impl TraceHeader {
    pub fn new(program: &str, query: &str, options: &EngineOptions) -> Self {
        TraceHeader {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION.to_string(),
            program: program.to_string(),
            query: query.to_string(),
            options: options.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    chrono: u64,
    goal_id: u64,
    depth: u32,
    port: Port,
    determinism: Determinism,
    module: String,
    name: String,
    arity: u32,
    mode_num: u32,
    proc_type: ProcType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    args: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goal_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local_vars: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ancestors: Option<Vec<u64>>,
}

impl From<&Event> for Record {
    fn from(e: &Event) -> Self {
        Record {
            chrono: e.chrono,
            goal_id: e.goal_id,
            depth: e.depth,
            port: e.port,
            determinism: e.determinism,
            module: e.predicate.module.to_string(),
            name: e.predicate.name.to_string(),
            arity: e.predicate.arity,
            mode_num: e.predicate.mode_num,
            proc_type: e.predicate.proc_type,
            args: e.args.clone(),
            goal_path: e.goal_path.as_ref().map(|p| p.to_string()),
            local_vars: e.local_vars.clone(),
            ancestors: e.ancestors.clone(),
        }
    }
}

impl Record {
    fn into_event(self) -> Result<Event, String> {
        let goal_path = self.goal_path.map(|p| p.parse::<GoalPath>()).transpose()?;
        Ok(Event {
            chrono: self.chrono,
            goal_id: self.goal_id,
            depth: self.depth,
            port: self.port,
            determinism: self.determinism,
            predicate: Predicate {
                module: self.module.into(),
                name: self.name.into(),
                arity: self.arity,
                mode_num: self.mode_num,
                proc_type: self.proc_type,
            },
            args: self.args,
            goal_path,
            local_vars: self.local_vars,
            ancestors: self.ancestors,
        })
    }
}

/// Streams events to a trace file. Usable directly as an engine sink.
pub struct TraceWriter<W: Write> {
    out: W,
    error: Option<io::Error>,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path, header: &TraceHeader) -> Result<Self, TraceError> {
        let file = File::create(path).map_err(|source| TraceError::Open {
            path: path.display().to_string(),
            source,
        })?;
        Ok(TraceWriter::new(BufWriter::new(file), header)?)
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, header: &TraceHeader) -> io::Result<Self> {
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        Ok(TraceWriter { out, error: None })
    }

    pub fn write_event(&mut self, event: &Event) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, &Record::from(event))?;
        self.out.write_all(b"\n")
    }

    /// Flushes and returns the underlying writer, or the first write error
    /// met while acting as a sink.
    pub fn finish(mut self) -> Result<W, TraceError> {
        if let Some(e) = self.error.take() {
            return Err(e.into());
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> EventSink for TraceWriter<W> {
    fn on_event(&mut self, event: &Event) -> StopFlag {
        match self.write_event(event) {
            Ok(()) => StopFlag::Continue,
            Err(e) => {
                self.error = Some(e);
                StopFlag::Stop
            }
        }
    }
}

pub fn write_trace<'e, I>(path: &Path, header: &TraceHeader, events: I) -> Result<(), TraceError>
where
    I: IntoIterator<Item = &'e Event>,
{
    let mut w = TraceWriter::create(path, header)?;
    for e in events {
        w.write_event(e)?;
    }
    w.finish()?;
    Ok(())
}

/// Reads events one line at a time.
pub struct TraceReader<R: BufRead> {
    lines: io::Lines<R>,
    header: TraceHeader,
    line: usize,
}

impl TraceReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self, TraceError> {
        let file = File::open(path).map_err(|source| TraceError::Open {
            path: path.display().to_string(),
            source,
        })?;
        TraceReader::new(BufReader::new(file))
    }
}

fn check_version(version: &str) -> Result<(), TraceError> {
    let major = version.split('.').next().and_then(|m| m.parse::<u32>().ok());
    if major == Some(SUPPORTED_MAJOR) {
        Ok(())
    } else {
        Err(TraceError::UnsupportedVersion {
            found: version.to_string(),
        })
    }
}

impl<R: BufRead> TraceReader<R> {
    pub fn new(reader: R) -> Result<Self, TraceError> {
        let mut lines = reader.lines();
        let first = lines.next().transpose()?.ok_or_else(|| TraceError::Malformed {
            line: 1,
            message: "missing header".to_string(),
        })?;
        let header: TraceHeader = serde_json::from_str(&first).map_err(|e| TraceError::Malformed {
            line: 1,
            message: format!("bad header: {e}"),
        })?;
        if header.format != FORMAT_NAME {
            return Err(TraceError::Malformed {
                line: 1,
                message: format!("not a trace file (format `{}`)", header.format),
            });
        }
        check_version(&header.version)?;
        Ok(TraceReader { lines, header, line: 1 })
    }

    pub fn header(&self) -> &TraceHeader {
        &self.header
    }

    /// 1-based number of the line most recently read.
    pub fn line(&self) -> usize {
        self.line
    }
}

impl<R: BufRead> Iterator for TraceReader<R> {
    type Item = Result<Event, TraceError>;

    fn next(&mut self) -> Option<Self::Item> {
        let text = match self.lines.next()? {
            Ok(t) => t,
            Err(e) => return Some(Err(e.into())),
        };
        self.line += 1;
        let line = self.line;
        let record: Record = match serde_json::from_str(&text) {
            Ok(r) => r,
            Err(e) => {
                return Some(Err(TraceError::Malformed {
                    line,
                    message: e.to_string(),
                }))
            }
        };
        Some(record.into_event().map_err(|message| TraceError::Malformed { line, message }))
    }
}

pub fn read_trace(path: &Path) -> Result<Vec<Event>, TraceError> {
    TraceReader::open(path)?.collect()
}

/// Folds `monitor` over a recorded trace, reading it lazily and stopping
/// at the first `Stop`.
pub fn replay<M: Monitor>(path: &Path, monitor: &M) -> Result<M::Acc, TraceError> {
    let mut reader = TraceReader::open(path)?;
    let mut acc = monitor.initialize();
    while let Some(event) = reader.next() {
        let event = event?;
        let (next, flag) = monitor.filter(&event, acc).map_err(|source| TraceError::Monitor {
            line: reader.line(),
            source,
        })?;
        acc = next;
        if flag == StopFlag::Stop {
            break;
        }
    }
    Ok(acc)
}
