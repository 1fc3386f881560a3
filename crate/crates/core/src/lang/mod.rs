//! A Prolog-subset source language: terms, goals, clauses and programs.
//!
//! The grammar covers facts and rules with `,` conjunction, `;`
//! disjunction, `( C -> T ; E )` if-then-else, list syntax, integers,
//! `is/2` arithmetic and integer comparisons. A program may carry
//! `:- det(name/arity, <determinism>).` pragmas.

mod parser;
mod render;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::trace_model::Determinism;

pub use parser::{parse_program, parse_query};
pub use render::render_term;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Atom(String),
    Int(i64),
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(name.to_string())
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn compound(name: &str, args: Vec<Term>) -> Term {
        Term::Compound(name.to_string(), args)
    }

    pub fn nil() -> Term {
        Term::Atom("[]".to_string())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(".".to_string(), vec![head, tail])
    }

    /// Builds a proper list.
    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |tail, head| Term::cons(head, tail))
    }

    /// Variable names in order of first occurrence, `_` excluded.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if v != "_" && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.variables(out)),
            Term::Atom(_) | Term::Int(_) => {}
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

/// `name/arity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: String,
    pub arity: u32,
}

impl PredKey {
    pub fn new(name: &str, arity: u32) -> Self {
        PredKey {
            name: name.to_string(),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Built-in predicates. None of them emit trace events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Is,
    NotUnify,
    Lt,
    Gt,
    Le,
    Ge,
    ArithEq,
    ArithNe,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::Is,
        Builtin::NotUnify,
        Builtin::Lt,
        Builtin::Gt,
        Builtin::Le,
        Builtin::Ge,
        Builtin::ArithEq,
        Builtin::ArithNe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Is => "is",
            Builtin::NotUnify => "\\=",
            Builtin::Lt => "<",
            Builtin::Gt => ">",
            Builtin::Le => "=<",
            Builtin::Ge => ">=",
            Builtin::ArithEq => "=:=",
            Builtin::ArithNe => "=\\=",
        }
    }

    /// All builtins are binary.
    pub fn from_name(name: &str, arity: usize) -> Option<Builtin> {
        if arity != 2 {
            return None;
        }
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    Call(PredKey, Vec<Term>),
    Unify(Term, Term),
    Builtin(Builtin, Vec<Term>),
    Conj(Vec<Goal>),
    Disj(Vec<Goal>),
    Ite(Box<Goal>, Box<Goal>, Box<Goal>),
    True,
    Fail,
}

impl Goal {
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Goal::Call(_, args) | Goal::Builtin(_, args) => {
                args.iter().for_each(|a| a.variables(out))
            }
            Goal::Unify(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            Goal::Conj(gs) | Goal::Disj(gs) => gs.iter().for_each(|g| g.variables(out)),
            Goal::Ite(c, t, e) => {
                c.variables(out);
                t.variables(out);
                e.variables(out);
            }
            Goal::True | Goal::Fail => {}
        }
    }

    /// Every user predicate called anywhere in the goal.
    pub fn called_predicates(&self, out: &mut Vec<PredKey>) {
        match self {
            Goal::Call(key, _) => out.push(key.clone()),
            Goal::Conj(gs) | Goal::Disj(gs) => gs.iter().for_each(|g| g.called_predicates(out)),
            Goal::Ite(c, t, e) => {
                c.called_predicates(out);
                t.called_predicates(out);
                e.called_predicates(out);
            }
            Goal::Unify(..) | Goal::Builtin(..) | Goal::True | Goal::Fail => {}
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_goal(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub args: Vec<Term>,
    pub body: Goal,
}

impl Clause {
    pub fn key(&self) -> PredKey {
        PredKey::new(&self.name, self.args.len() as u32)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_clause(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    /// Reported as the module attribute of every event.
    pub module: String,
    pub predicates: IndexMap<PredKey, Vec<Clause>>,
    pub pragmas: IndexMap<PredKey, Determinism>,
}

impl Default for Program {
    fn default() -> Self {
        Program {
            module: "user".to_string(),
            predicates: IndexMap::new(),
            pragmas: IndexMap::new(),
        }
    }
}

impl Program {
    pub fn clauses(&self, key: &PredKey) -> Option<&[Clause]> {
        self.predicates.get(key).map(Vec::as_slice)
    }

    pub fn determinism(&self, key: &PredKey) -> Determinism {
        self.pragmas.get(key).copied().unwrap_or_default()
    }

    pub fn with_module(mut self, module: &str) -> Self {
        self.module = module.to_string();
        self
    }

    /// Predicates called from some clause body but never defined.
    pub fn undefined_predicates(&self) -> Vec<PredKey> {
        let mut called = Vec::new();
        for clause in self.predicates.values().flatten() {
            clause.body.called_predicates(&mut called);
        }
        let mut missing: Vec<PredKey> = called
            .into_iter()
            .filter(|k| !self.predicates.contains_key(k))
            .collect();
        missing.sort();
        missing.dedup();
        missing
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_program(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate determinism pragma for {predicate} at line {line}")]
    DuplicatePragma { predicate: PredKey, line: usize },
}
