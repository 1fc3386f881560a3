//! Continuation-passing solver.
//!
//! Each user call opens a procedure box: `call` on entry, `exit` before the
//! continuation runs, `redo` when the continuation returns (backtracking
//! into the box) and `fail` once every clause is exhausted. Unwinding for a
//! stop request, the first-solution cutoff or an if-then-else commit travels
//! through `Err` so no further port events are produced on the way out.

use std::collections::HashMap;

use super::store::{CTerm, RTerm, Store};
use super::{EngineError, EngineOptions, EventSink, RunOutcome, Solution, StopFlag};
use crate::lang::{Builtin, Goal, PredKey, Program};
use crate::trace_model::{Determinism, Event, GoalPath, PathStep, Port, Predicate};

const RED_ZONE: usize = 128 * 1024;
const STACK_CHUNK: usize = 4 * 1024 * 1024;

struct CClause {
    nvars: usize,
    head: Box<[CTerm]>,
    body: CGoal,
}

struct CPred {
    predicate: Predicate,
    determinism: Determinism,
    clauses: Vec<CClause>,
}

enum CGoal {
    Call(usize, Box<[CTerm]>),
    Undefined(PredKey),
    Unify(CTerm, CTerm),
    Builtin(Builtin, CTerm, CTerm),
    Conj(Box<[CGoal]>),
    Disj(Box<[(GoalPath, CGoal)]>),
    Ite {
        cond: Box<CGoal>,
        then: Box<CGoal>,
        els: Box<CGoal>,
        then_path: GoalPath,
        else_path: GoalPath,
    },
    True,
    Fail,
}

struct Vars {
    names: HashMap<String, usize>,
    next: usize,
}

impl Vars {
    fn new() -> Self {
        Vars {
            names: HashMap::new(),
            next: 0,
        }
    }

    fn term(&mut self, t: &crate::lang::Term) -> CTerm {
        CTerm::compile(t, &mut self.names, &mut self.next)
    }
}

fn compile_goal(g: &Goal, path: &GoalPath, vars: &mut Vars, index: &HashMap<PredKey, usize>) -> CGoal {
    match g {
        Goal::True => CGoal::True,
        Goal::Fail => CGoal::Fail,
        Goal::Call(key, args) => {
            let cargs: Box<[CTerm]> = args.iter().map(|a| vars.term(a)).collect();
            match index.get(key) {
                Some(&p) => CGoal::Call(p, cargs),
                None => CGoal::Undefined(key.clone()),
            }
        }
        Goal::Unify(a, b) => CGoal::Unify(vars.term(a), vars.term(b)),
        Goal::Builtin(b, args) => CGoal::Builtin(*b, vars.term(&args[0]), vars.term(&args[1])),
        Goal::Conj(gs) if gs.len() == 1 => compile_goal(&gs[0], path, vars, index),
        Goal::Conj(gs) => CGoal::Conj(
            gs.iter()
                .enumerate()
                .map(|(i, g)| compile_goal(g, &path.child(PathStep::Conj(i as u32 + 1)), vars, index))
                .collect(),
        ),
        Goal::Disj(bs) => CGoal::Disj(
            bs.iter()
                .enumerate()
                .map(|(i, b)| {
                    let p = path.child(PathStep::Disj(i as u32 + 1));
                    let body = compile_goal(b, &p, vars, index);
                    (p, body)
                })
                .collect(),
        ),
        Goal::Ite(c, t, e) => {
            let then_path = path.child(PathStep::Then);
            let else_path = path.child(PathStep::Else);
            CGoal::Ite {
                cond: Box::new(compile_goal(c, path, vars, index)),
                then: Box::new(compile_goal(t, &then_path, vars, index)),
                els: Box::new(compile_goal(e, &else_path, vars, index)),
                then_path,
                else_path,
            }
        }
    }
}

fn compile_program(program: &Program) -> (Vec<CPred>, HashMap<PredKey, usize>) {
    let index: HashMap<PredKey, usize> = program
        .predicates
        .keys()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let preds = program
        .predicates
        .iter()
        .map(|(key, clauses)| CPred {
            predicate: Predicate::new(&program.module, &key.name, key.arity),
            determinism: program.determinism(key),
            clauses: clauses
                .iter()
                .map(|c| {
                    let mut vars = Vars::new();
                    let head = c.args.iter().map(|a| vars.term(a)).collect();
                    let body = compile_goal(&c.body, &GoalPath::new(), &mut vars, &index);
                    CClause {
                        nvars: vars.next,
                        head,
                        body,
                    }
                })
                .collect(),
        })
        .collect();
    (preds, index)
}

enum Unwind {
    Stop,
    Done,
    Cut(u64),
    Error(EngineError),
}

type Step = Result<(), Unwind>;

/// Enclosing procedure box. `pred` is `None` for the synthetic query root.
#[derive(Clone, Copy)]
struct Frame {
    goal_id: u64,
    depth: u32,
    pred: Option<usize>,
}

struct Machine<'a, 's> {
    preds: &'a [CPred],
    options: &'a EngineOptions,
    sink: Option<&'s mut dyn EventSink>,
    store: Store,
    next_goal_id: u64,
    next_cut: u64,
    chrono: u64,
}

impl<'a, 's> Machine<'a, 's> {
    fn emit(&mut self, port: Port, frame: Frame, path: Option<&GoalPath>, args: Option<&[RTerm]>) -> Step {
        let Some(p) = frame.pred else { return Ok(()) };
        if self.sink.is_none() {
            return Ok(());
        }
        if let Some(max) = self.options.max_events {
            if self.chrono >= max {
                return Err(Unwind::Stop);
            }
        }
        let args = match args {
            Some(args) if self.options.capture_args => Some(
                args.iter()
                    .map(|a| crate::lang::render_term(&self.store.resolve(a)))
                    .collect(),
            ),
            _ => None,
        };
        self.chrono += 1;
        let pred = &self.preds[p];
        let event = Event {
            chrono: self.chrono,
            goal_id: frame.goal_id,
            depth: frame.depth,
            port,
            determinism: pred.determinism,
            predicate: pred.predicate.clone(),
            args,
            goal_path: path.cloned(),
            local_vars: None,
            ancestors: None,
        };
        match self.sink.as_deref_mut().map(|s| s.on_event(&event)) {
            Some(StopFlag::Stop) => Err(Unwind::Stop),
            _ => Ok(()),
        }
    }

    fn emit_internal(&mut self, port: Port, frame: Frame, path: &GoalPath) -> Step {
        if self.options.emit_internal_events {
            self.emit(port, frame, Some(path), None)
        } else {
            Ok(())
        }
    }

    fn solve(&mut self, g: &CGoal, base: usize, frame: Frame, k: &mut dyn FnMut(&mut Machine<'a, 's>) -> Step) -> Step {
        match g {
            CGoal::True => k(self),
            CGoal::Fail => Ok(()),
            CGoal::Undefined(key) => Err(Unwind::Error(EngineError::UndefinedPredicate(key.clone()))),
            CGoal::Unify(a, b) => {
                let mark = self.store.mark();
                let rb = b.instantiate(base);
                if self.store.unify_head(a, base, &rb) {
                    k(self)?;
                }
                self.store.undo(mark);
                Ok(())
            }
            CGoal::Builtin(b, x, y) => {
                let mark = self.store.mark();
                let (rx, ry) = (x.instantiate(base), y.instantiate(base));
                let ok = self.store.builtin(*b, &rx, &ry).map_err(Unwind::Error)?;
                if ok {
                    k(self)?;
                }
                self.store.undo(mark);
                Ok(())
            }
            CGoal::Conj(gs) => self.solve_conj(gs, base, frame, k),
            CGoal::Disj(branches) => {
                for (path, branch) in branches.iter() {
                    self.emit_internal(Port::Disj, frame, path)?;
                    self.solve(branch, base, frame, k)?;
                }
                Ok(())
            }
            CGoal::Ite {
                cond,
                then,
                els,
                then_path,
                else_path,
            } => {
                let mark = self.store.mark();
                self.next_cut += 1;
                let cut = self.next_cut;
                let res = self.solve(cond, base, frame, &mut |m| {
                    m.emit_internal(Port::Then, frame, then_path)?;
                    m.solve(then, base, frame, k)?;
                    Err(Unwind::Cut(cut))
                });
                match res {
                    Ok(()) => {
                        self.emit_internal(Port::Else, frame, else_path)?;
                        self.solve(els, base, frame, k)
                    }
                    Err(Unwind::Cut(c)) if c == cut => {
                        self.store.undo(mark);
                        Ok(())
                    }
                    Err(e) => Err(e),
                }
            }
            CGoal::Call(p, cargs) => {
                let args: Vec<RTerm> = cargs.iter().map(|a| a.instantiate(base)).collect();
                let p = *p;
                stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.call(p, &args, frame, k))
            }
        }
    }

    fn solve_conj(&mut self, gs: &[CGoal], base: usize, frame: Frame, k: &mut dyn FnMut(&mut Machine<'a, 's>) -> Step) -> Step {
        match gs {
            [] => k(self),
            [only] => self.solve(only, base, frame, k),
            [first, rest @ ..] => self.solve(first, base, frame, &mut |m| m.solve_conj(rest, base, frame, k)),
        }
    }

    fn call(&mut self, p: usize, args: &[RTerm], parent: Frame, k: &mut dyn FnMut(&mut Machine<'a, 's>) -> Step) -> Step {
        self.next_goal_id += 1;
        let frame = Frame {
            goal_id: self.next_goal_id,
            depth: parent.depth + 1,
            pred: Some(p),
        };
        self.emit(Port::Call, frame, None, Some(args))?;
        let preds = self.preds;
        for clause in &preds[p].clauses {
            let mark = self.store.mark();
            let base = self.store.alloc(clause.nvars);
            let head_ok = clause
                .head
                .iter()
                .zip(args)
                .all(|(h, a)| self.store.unify_head(h, base, a));
            if head_ok {
                self.solve(&clause.body, base, frame, &mut |m| {
                    m.emit(Port::Exit, frame, None, Some(args))?;
                    stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || k(m))?;
                    m.emit(Port::Redo, frame, None, Some(args))
                })?;
            }
            self.store.undo(mark);
        }
        self.emit(Port::Fail, frame, None, Some(args))
    }
}

pub(super) fn run(
    program: &Program,
    query: &Goal,
    options: &EngineOptions,
    sink: Option<&mut dyn EventSink>,
) -> Result<RunOutcome, EngineError> {
    let (preds, index) = compile_program(program);
    let mut vars = Vars::new();
    let goal = compile_goal(query, &GoalPath::new(), &mut vars, &index);
    let mut names: Vec<(String, usize)> = vars.names.into_iter().collect();
    names.sort_by_key(|(_, i)| *i);

    let mut machine = Machine {
        preds: &preds,
        options,
        sink,
        store: Store::default(),
        next_goal_id: 0,
        next_cut: 0,
        chrono: 0,
    };
    let base = machine.store.alloc(vars.next);
    let root = Frame {
        goal_id: 0,
        depth: 0,
        pred: None,
    };
    let mut solutions: Vec<Solution> = Vec::new();
    let all = options.all_solutions;
    let res = machine.solve(&goal, base, root, &mut |m| {
        solutions.push(
            names
                .iter()
                .map(|(name, i)| (name.clone(), m.store.resolve(&RTerm::Var(base + i))))
                .collect(),
        );
        if all {
            Ok(())
        } else {
            Err(Unwind::Done)
        }
    });
    let stopped_early = match res {
        Ok(()) | Err(Unwind::Done) => false,
        Err(Unwind::Stop) => true,
        Err(Unwind::Error(e)) => return Err(e),
        Err(Unwind::Cut(_)) => unreachable!("if-then-else commit escaped its construct"),
    };
    Ok(RunOutcome {
        solutions,
        stopped_early,
        events_emitted: machine.chrono,
    })
}
