//! The collect framework: monitors as left folds over the live event stream.
//!
//! A [`Monitor`] supplies an initial accumulator and a filter step. The
//! filter sees each event as the engine emits it, returns the updated
//! accumulator and a [`StopFlag`]; `Stop` unwinds the execution at once.
//! [`foldl_oracle`] performs the same fold over an already materialized
//! trace and serves as the reference the streaming runner is checked
//! against.

use std::any::Any;
use std::fmt;
use std::sync::mpsc::{self, Receiver, SyncSender};
use std::thread::JoinHandle;

use thiserror::Error;

use crate::engine::{self, EngineError, EngineOptions, EventSink, RunOutcome, Solution};
use crate::lang::{Goal, Program};
use crate::trace_model::Event;

pub use crate::engine::StopFlag;

/// Rendered monitor result.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Json(serde_json::Value),
    Dot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("{0}")]
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollectError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("monitor failed at event {chrono}: {source}")]
    Monitor { chrono: u64, source: MonitorError },
    #[error("cannot merge an empty list of monitors")]
    EmptyMerge,
    #[error("checkpoint interval must be at least 1")]
    InvalidInterval,
    #[error("collect session is exhausted")]
    SessionExhausted,
    #[error("collect session worker terminated unexpectedly")]
    SessionLost,
}

/// An analysis expressed as a fold over trace events.
///
/// `filter` must be a pure function of its inputs.
pub trait Monitor {
    type Acc;

    fn name(&self) -> &str;

    fn initialize(&self) -> Self::Acc;

    fn filter(&self, event: &Event, acc: Self::Acc) -> Result<(Self::Acc, StopFlag), MonitorError>;

    /// Renders a final accumulator for display.
    fn finish(&self, _acc: &Self::Acc) -> Option<Output> {
        None
    }
}

impl<M: Monitor + ?Sized> Monitor for &M {
    type Acc = M::Acc;

    fn name(&self) -> &str {
        (**self).name()
    }

    fn initialize(&self) -> Self::Acc {
        (**self).initialize()
    }

    fn filter(&self, event: &Event, acc: Self::Acc) -> Result<(Self::Acc, StopFlag), MonitorError> {
        (**self).filter(event, acc)
    }

    fn finish(&self, acc: &Self::Acc) -> Option<Output> {
        (**self).finish(acc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollectOutcome<A> {
    pub result: A,
    pub stopped_early: bool,
    pub events: u64,
    pub solutions: Vec<Solution>,
}

/// Sink that folds each event into the accumulator as it arrives.
struct FoldSink<'m, M: Monitor> {
    monitor: &'m M,
    acc: Option<M::Acc>,
    failure: Option<(u64, MonitorError)>,
}

impl<M: Monitor> EventSink for FoldSink<'_, M> {
    fn on_event(&mut self, event: &Event) -> StopFlag {
        let acc = self.acc.take().expect("accumulator present while running");
        match self.monitor.filter(event, acc) {
            Ok((acc, flag)) => {
                self.acc = Some(acc);
                flag
            }
            Err(e) => {
                self.failure = Some((event.chrono, e));
                StopFlag::Stop
            }
        }
    }
}

/// Runs `query` with `monitor` plugged into the tracer.
pub fn run_collect<M: Monitor>(
    program: &Program,
    query: &Goal,
    options: &EngineOptions,
    monitor: &M,
) -> Result<CollectOutcome<M::Acc>, CollectError> {
    let mut sink = FoldSink {
        monitor,
        acc: Some(monitor.initialize()),
        failure: None,
    };
    let outcome = engine::solve(program, query, options, &mut sink)?;
    if let Some((chrono, source)) = sink.failure {
        return Err(CollectError::Monitor { chrono, source });
    }
    Ok(CollectOutcome {
        result: sink.acc.expect("accumulator restored after run"),
        stopped_early: outcome.stopped_early,
        events: outcome.events_emitted,
        solutions: outcome.solutions,
    })
}

/// Left fold over a materialized trace, truncated at the first `Stop`.
pub fn foldl_oracle<'e, M, I>(events: I, monitor: &M) -> Result<M::Acc, CollectError>
where
    M: Monitor,
    I: IntoIterator<Item = &'e Event>,
{
    let mut acc = monitor.initialize();
    for event in events {
        let (next, flag) = monitor
            .filter(event, acc)
            .map_err(|source| CollectError::Monitor {
                chrono: event.chrono,
                source,
            })?;
        acc = next;
        if flag == StopFlag::Stop {
            break;
        }
    }
    Ok(acc)
}

trait AnyAcc: Any + Send {
    fn clone_box(&self) -> Box<dyn AnyAcc>;
    fn eq_dyn(&self, other: &dyn AnyAcc) -> bool;
    fn debug(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
    fn as_any(&self) -> &dyn Any;
    fn into_any(self: Box<Self>) -> Box<dyn Any>;
}

impl<T> AnyAcc for T
where
    T: Any + Send + Clone + PartialEq + fmt::Debug,
{
    fn clone_box(&self) -> Box<dyn AnyAcc> {
        Box::new(self.clone())
    }

    fn eq_dyn(&self, other: &dyn AnyAcc) -> bool {
        other.as_any().downcast_ref::<T>() == Some(self)
    }

    fn debug(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn into_any(self: Box<Self>) -> Box<dyn Any> {
        self
    }
}

/// Accumulator of a [`BoxedMonitor`], type-erased.
pub struct ErasedAcc(Box<dyn AnyAcc>);

impl ErasedAcc {
    pub fn new<T: Any + Send + Clone + PartialEq + fmt::Debug>(value: T) -> Self {
        ErasedAcc(Box::new(value))
    }

    pub fn downcast_ref<T: Any>(&self) -> Option<&T> {
        self.0.as_any().downcast_ref()
    }
}

impl Clone for ErasedAcc {
    fn clone(&self) -> Self {
        ErasedAcc(self.0.clone_box())
    }
}

impl PartialEq for ErasedAcc {
    fn eq(&self, other: &Self) -> bool {
        self.0.eq_dyn(&*other.0)
    }
}

impl fmt::Debug for ErasedAcc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.debug(f)
    }
}

trait DynMonitor: Send + Sync {
    fn dyn_name(&self) -> &str;
    fn dyn_initialize(&self) -> ErasedAcc;
    fn dyn_filter(&self, event: &Event, acc: ErasedAcc) -> Result<(ErasedAcc, StopFlag), MonitorError>;
    fn dyn_finish(&self, acc: &ErasedAcc) -> Option<Output>;
}

impl<M> DynMonitor for M
where
    M: Monitor + Send + Sync,
    M::Acc: Any + Send + Clone + PartialEq + fmt::Debug,
{
    fn dyn_name(&self) -> &str {
        Monitor::name(self)
    }

    fn dyn_initialize(&self) -> ErasedAcc {
        ErasedAcc::new(Monitor::initialize(self))
    }

    fn dyn_filter(&self, event: &Event, acc: ErasedAcc) -> Result<(ErasedAcc, StopFlag), MonitorError> {
        let acc = acc
            .0
            .into_any()
            .downcast::<M::Acc>()
            .map_err(|_| MonitorError::Failed(format!("accumulator type mismatch in {}", Monitor::name(self))))?;
        let (next, flag) = Monitor::filter(self, event, *acc)?;
        Ok((ErasedAcc::new(next), flag))
    }

    fn dyn_finish(&self, acc: &ErasedAcc) -> Option<Output> {
        acc.downcast_ref::<M::Acc>().and_then(|a| Monitor::finish(self, a))
    }
}

/// A monitor with its accumulator type erased, so monitors of different
/// types can be selected at runtime and merged.
pub struct BoxedMonitor(Box<dyn DynMonitor>);

impl BoxedMonitor {
    pub fn new<M>(monitor: M) -> Self
    where
        M: Monitor + Send + Sync + 'static,
        M::Acc: Any + Send + Clone + PartialEq + fmt::Debug,
    {
        BoxedMonitor(Box::new(monitor))
    }
}

impl fmt::Debug for BoxedMonitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("BoxedMonitor").field(&self.0.dyn_name()).finish()
    }
}

impl Monitor for BoxedMonitor {
    type Acc = ErasedAcc;

    fn name(&self) -> &str {
        self.0.dyn_name()
    }

    fn initialize(&self) -> ErasedAcc {
        self.0.dyn_initialize()
    }

    fn filter(&self, event: &Event, acc: ErasedAcc) -> Result<(ErasedAcc, StopFlag), MonitorError> {
        self.0.dyn_filter(event, acc)
    }

    fn finish(&self, acc: &ErasedAcc) -> Option<Output> {
        self.0.dyn_finish(acc)
    }
}

/// Several monitors run side by side over one execution.
#[derive(Debug)]
pub struct Merged {
    parts: Vec<BoxedMonitor>,
    name: String,
}

impl Merged {
    pub fn parts(&self) -> &[BoxedMonitor] {
        &self.parts
    }

    /// Renders each component with its own monitor, in input order.
    pub fn finish_each(&self, acc: &[ErasedAcc]) -> Vec<(String, Option<Output>)> {
        self.parts
            .iter()
            .zip(acc)
            .map(|(m, a)| (m.name().to_string(), m.finish(a)))
            .collect()
    }
}

/// Merges monitors into one whose accumulator holds each component's, in
/// input order. The merged step stops if any component asks to stop.
pub fn merge(monitors: Vec<BoxedMonitor>) -> Result<Merged, CollectError> {
    if monitors.is_empty() {
        return Err(CollectError::EmptyMerge);
    }
    let name = monitors.iter().map(|m| m.name()).collect::<Vec<_>>().join("+");
    Ok(Merged {
        parts: monitors,
        name,
    })
}

impl Monitor for Merged {
    type Acc = Vec<ErasedAcc>;

    fn name(&self) -> &str {
        &self.name
    }

    fn initialize(&self) -> Vec<ErasedAcc> {
        self.parts.iter().map(|m| m.initialize()).collect()
    }

    fn filter(&self, event: &Event, acc: Vec<ErasedAcc>) -> Result<(Vec<ErasedAcc>, StopFlag), MonitorError> {
        let mut flag = StopFlag::Continue;
        let mut out = Vec::with_capacity(acc.len());
        for (m, a) in self.parts.iter().zip(acc) {
            let (next, f) = m.filter(event, a)?;
            if f == StopFlag::Stop {
                flag = StopFlag::Stop;
            }
            out.push(next);
        }
        Ok((out, flag))
    }
}

/// Where a [`CollectSession`] stands after [`CollectSession::resume`].
#[derive(Clone, Debug, PartialEq)]
pub enum SessionState<A> {
    /// Paused after `events` events; the accumulator is readable through
    /// [`CollectSession::accumulator`] until the next resume.
    Suspended { events: u64 },
    Finished(CollectOutcome<A>),
}

enum Reply<A> {
    Suspended { acc: A, events: u64 },
    Finished(Result<CollectOutcome<A>, CollectError>),
}

/// A collect run that pauses every `every_n` events.
///
/// The execution lives on a worker thread that blocks at each checkpoint
/// until [`resume`](CollectSession::resume) is called again. While paused,
/// the accumulator is moved over to the session and moved back on resume,
/// so checkpoints cost nothing beyond the handoff. Filtering happens on the
/// worker through plain calls, as with [`run_collect`]. Dropping a
/// suspended session abandons the execution.
pub struct CollectSession<A> {
    resume_tx: Option<SyncSender<Option<A>>>,
    reply_rx: Receiver<Reply<A>>,
    worker: Option<JoinHandle<()>>,
    current: Option<A>,
    events: u64,
    started: bool,
    exhausted: bool,
}

struct CheckpointSink<'m, M: Monitor> {
    inner: FoldSink<'m, M>,
    every_n: u64,
    seen: u64,
    reply_tx: SyncSender<Reply<M::Acc>>,
    resume_rx: Receiver<Option<M::Acc>>,
}

impl<M: Monitor> EventSink for CheckpointSink<'_, M> {
    fn on_event(&mut self, event: &Event) -> StopFlag {
        let flag = self.inner.on_event(event);
        self.seen += 1;
        if flag == StopFlag::Stop || !self.seen.is_multiple_of(self.every_n) {
            return flag;
        }
        let acc = self.inner.acc.take().expect("accumulator present");
        let suspended = Reply::Suspended {
            acc,
            events: self.seen,
        };
        if self.reply_tx.send(suspended).is_err() {
            return StopFlag::Stop;
        }
        match self.resume_rx.recv() {
            Ok(Some(acc)) => {
                self.inner.acc = Some(acc);
                StopFlag::Continue
            }
            _ => StopFlag::Stop,
        }
    }
}

impl<A: Send + 'static> CollectSession<A> {
    pub fn new<M>(
        program: &Program,
        query: &Goal,
        options: &EngineOptions,
        monitor: M,
        every_n: u64,
    ) -> Result<Self, CollectError>
    where
        M: Monitor<Acc = A> + Send + 'static,
    {
        if every_n == 0 {
            return Err(CollectError::InvalidInterval);
        }
        let (program, query, options) = (program.clone(), query.clone(), options.clone());
        let (resume_tx, resume_rx) = mpsc::sync_channel::<Option<A>>(0);
        let (reply_tx, reply_rx) = mpsc::sync_channel::<Reply<A>>(0);
        let worker = std::thread::Builder::new()
            .name("collect-session".into())
            .spawn(move || {
                // Wait for the first resume before running anything.
                if resume_rx.recv().is_err() {
                    return;
                }
                let mut sink = CheckpointSink {
                    inner: FoldSink {
                        monitor: &monitor,
                        acc: Some(monitor.initialize()),
                        failure: None,
                    },
                    every_n,
                    seen: 0,
                    reply_tx: reply_tx.clone(),
                    resume_rx,
                };
                let outcome = engine::solve(&program, &query, &options, &mut sink);
                // No accumulator means the session was dropped mid-run.
                let Some(acc) = sink.inner.acc else { return };
                let result = match (outcome, sink.inner.failure) {
                    (Err(e), _) => Err(CollectError::Engine(e)),
                    (Ok(_), Some((chrono, source))) => Err(CollectError::Monitor { chrono, source }),
                    (Ok(RunOutcome {
                        solutions,
                        stopped_early,
                        events_emitted,
                    }), None) => Ok(CollectOutcome {
                        result: acc,
                        stopped_early,
                        events: events_emitted,
                        solutions,
                    }),
                };
                let _ = reply_tx.send(Reply::Finished(result));
            })
            .map_err(|_| CollectError::SessionLost)?;
        Ok(CollectSession {
            resume_tx: Some(resume_tx),
            reply_rx,
            worker: Some(worker),
            current: None,
            events: 0,
            started: false,
            exhausted: false,
        })
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// The accumulator at the last checkpoint, while suspended.
    pub fn accumulator(&self) -> Option<&A> {
        self.current.as_ref()
    }

    /// Events seen up to the last checkpoint.
    pub fn events(&self) -> u64 {
        self.events
    }

    /// Runs until the next checkpoint or the end of the execution.
    pub fn resume(&mut self) -> Result<SessionState<A>, CollectError> {
        if self.exhausted {
            return Err(CollectError::SessionExhausted);
        }
        let token = if self.started {
            match self.current.take() {
                Some(acc) => Some(acc),
                None => {
                    self.exhausted = true;
                    return Err(CollectError::SessionLost);
                }
            }
        } else {
            None
        };
        self.started = true;
        let tx = self.resume_tx.as_ref().ok_or(CollectError::SessionLost)?;
        if tx.send(token).is_err() {
            self.exhausted = true;
            return Err(CollectError::SessionLost);
        }
        match self.reply_rx.recv() {
            Ok(Reply::Suspended { acc, events }) => {
                self.current = Some(acc);
                self.events = events;
                Ok(SessionState::Suspended { events })
            }
            Ok(Reply::Finished(result)) => {
                self.exhausted = true;
                self.resume_tx = None;
                if let Some(w) = self.worker.take() {
                    let _ = w.join();
                }
                if let Ok(out) = &result {
                    self.events = out.events;
                }
                result.map(SessionState::Finished)
            }
            Err(_) => {
                self.exhausted = true;
                Err(CollectError::SessionLost)
            }
        }
    }
}

impl<A> Drop for CollectSession<A> {
    fn drop(&mut self) {
        // Closing the resume channel makes a paused worker unwind.
        self.resume_tx = None;
        while self.reply_rx.try_recv().is_ok() {}
        drop(std::mem::replace(&mut self.reply_rx, mpsc::sync_channel(0).1));
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

/// Runs `monitor` pausing every `every_n` events to show the accumulator to
/// `emit`. The final result equals [`run_collect`]'s.
pub fn collect_checkpointed<M, F>(
    program: &Program,
    query: &Goal,
    options: &EngineOptions,
    monitor: M,
    every_n: u64,
    mut emit: F,
) -> Result<CollectOutcome<M::Acc>, CollectError>
where
    M: Monitor + Send + 'static,
    M::Acc: Send + 'static,
    F: FnMut(&M::Acc),
{
    let mut session = CollectSession::new(program, query, options, monitor, every_n)?;
    loop {
        match session.resume()? {
            SessionState::Suspended { .. } => emit(session.accumulator().expect("suspended session holds the accumulator")),
            SessionState::Finished(outcome) => return Ok(outcome),
        }
    }
}
