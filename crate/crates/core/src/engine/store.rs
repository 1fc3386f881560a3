//! Runtime terms and the trailed binding store.

use std::collections::HashMap;
use std::rc::Rc;

use super::EngineError;
use crate::lang::{Builtin, Term};

#[derive(Clone, Debug)]
pub(crate) enum RTerm {
    Var(usize),
    Atom(Rc<str>),
    Int(i64),
    Struct(Rc<str>, Rc<[RTerm]>),
}

/// Clause-local term; variables are offsets from the clause's frame base.
#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Var(usize),
    /// Ground subterm, shared between instantiations.
    Const(RTerm),
    Struct(Rc<str>, Box<[CTerm]>),
}

impl CTerm {
    pub(crate) fn compile(t: &Term, vars: &mut HashMap<String, usize>, next: &mut usize) -> CTerm {
        match t {
            Term::Var(name) => {
                if name == "_" {
                    *next += 1;
                    return CTerm::Var(*next - 1);
                }
                let idx = *vars.entry(name.clone()).or_insert_with(|| {
                    *next += 1;
                    *next - 1
                });
                CTerm::Var(idx)
            }
            Term::Atom(a) => CTerm::Const(RTerm::Atom(a.as_str().into())),
            Term::Int(i) => CTerm::Const(RTerm::Int(*i)),
            Term::Compound(f, args) => {
                let cargs: Box<[CTerm]> = args.iter().map(|a| CTerm::compile(a, vars, next)).collect();
                if cargs.iter().all(|a| matches!(a, CTerm::Const(_))) {
                    let ground: Rc<[RTerm]> = cargs
                        .iter()
                        .map(|a| match a {
                            CTerm::Const(r) => r.clone(),
                            _ => unreachable!(),
                        })
                        .collect();
                    CTerm::Const(RTerm::Struct(f.as_str().into(), ground))
                } else {
                    CTerm::Struct(f.as_str().into(), cargs)
                }
            }
        }
    }

    pub(crate) fn instantiate(&self, base: usize) -> RTerm {
        match self {
            CTerm::Var(i) => RTerm::Var(base + i),
            CTerm::Const(r) => r.clone(),
            CTerm::Struct(f, args) => {
                RTerm::Struct(f.clone(), args.iter().map(|a| a.instantiate(base)).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Mark {
    trail: usize,
    vars: usize,
}

#[derive(Default, Debug)]
pub(crate) struct Store {
    bindings: Vec<Option<RTerm>>,
    trail: Vec<usize>,
}

impl Store {
    pub(crate) fn alloc(&mut self, n: usize) -> usize {
        let base = self.bindings.len();
        self.bindings.resize(base + n, None);
        base
    }

    pub(crate) fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            vars: self.bindings.len(),
        }
    }

    /// Undoes bindings made since `mark` and drops variables allocated after it.
    pub(crate) fn undo(&mut self, mark: Mark) {
        for v in self.trail.drain(mark.trail..) {
            if v < mark.vars {
                self.bindings[v] = None;
            }
        }
        self.bindings.truncate(mark.vars);
    }

    fn bind(&mut self, v: usize, t: RTerm) {
        self.bindings[v] = Some(t);
        self.trail.push(v);
    }

    pub(crate) fn deref(&self, t: &RTerm) -> RTerm {
        let mut cur = t.clone();
        while let RTerm::Var(v) = cur {
            match &self.bindings[v] {
                Some(next) => cur = next.clone(),
                None => return RTerm::Var(v),
            }
        }
        cur
    }

    pub(crate) fn unify(&mut self, a: &RTerm, b: &RTerm) -> bool {
        let a = self.deref(a);
        let b = self.deref(b);
        match (&a, &b) {
            (RTerm::Var(x), RTerm::Var(y)) if x == y => true,
            // Bind the younger variable so older ones never point forward.
            (RTerm::Var(x), RTerm::Var(y)) => {
                if x < y {
                    self.bind(*y, a);
                } else {
                    self.bind(*x, b);
                }
                true
            }
            (RTerm::Var(x), _) => {
                self.bind(*x, b);
                true
            }
            (_, RTerm::Var(y)) => {
                self.bind(*y, a);
                true
            }
            (RTerm::Int(x), RTerm::Int(y)) => x == y,
            (RTerm::Atom(x), RTerm::Atom(y)) => x == y,
            (RTerm::Struct(f, xs), RTerm::Struct(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    /// Unifies a clause-local term against a runtime term without first
    /// building the clause term.
    pub(crate) fn unify_head(&mut self, c: &CTerm, base: usize, t: &RTerm) -> bool {
        match c {
            CTerm::Var(i) => self.unify(&RTerm::Var(base + i), t),
            CTerm::Const(r) => self.unify(r, t),
            CTerm::Struct(f, cargs) => match self.deref(t) {
                RTerm::Var(v) => {
                    let built = c.instantiate(base);
                    self.bind(v, built);
                    true
                }
                RTerm::Struct(g, targs) => {
                    *f == g
                        && cargs.len() == targs.len()
                        && cargs
                            .iter()
                            .zip(targs.iter())
                            .all(|(ca, ta)| self.unify_head(ca, base, ta))
                }
                _ => false,
            },
        }
    }

    /// Fully dereferenced source-level view. Unbound variables print as `_G<n>`.
    pub(crate) fn resolve(&self, t: &RTerm) -> Term {
        match self.deref(t) {
            RTerm::Var(v) => Term::Var(format!("_G{v}")),
            RTerm::Atom(a) => Term::Atom(a.to_string()),
            RTerm::Int(i) => Term::Int(i),
            RTerm::Struct(f, args) => {
                Term::Compound(f.to_string(), args.iter().map(|a| self.resolve(a)).collect())
            }
        }
    }

    pub(crate) fn eval(&self, t: &RTerm) -> Result<i64, EngineError> {
        match self.deref(t) {
            RTerm::Int(i) => Ok(i),
            RTerm::Var(_) => Err(EngineError::UnboundArithmetic),
            RTerm::Struct(op, args) if args.len() == 2 => {
                let x = self.eval(&args[0])?;
                let y = self.eval(&args[1])?;
                let overflow = || EngineError::ArithmeticOverflow(format!("{x} {op} {y}"));
                match &*op {
                    "+" => x.checked_add(y).ok_or_else(overflow),
                    "-" => x.checked_sub(y).ok_or_else(overflow),
                    "*" => x.checked_mul(y).ok_or_else(overflow),
                    "//" | "mod" if y == 0 => Err(EngineError::DivisionByZero),
                    "//" => x.checked_div(y).ok_or_else(overflow),
                    "mod" => x.checked_rem_euclid(y).ok_or_else(overflow),
                    _ => Err(EngineError::NonIntegerOperand(
                        crate::lang::render_term(&self.resolve(t)),
                    )),
                }
            }
            RTerm::Struct(op, args) if args.len() == 1 && &*op == "-" => {
                let x = self.eval(&args[0])?;
                x.checked_neg()
                    .ok_or_else(|| EngineError::ArithmeticOverflow(format!("-{x}")))
            }
            other => Err(EngineError::NonIntegerOperand(crate::lang::render_term(
                &self.resolve(&other),
            ))),
        }
    }

    /// Runs a builtin; on failure any partial bindings are left for the
    /// caller's undo.
    pub(crate) fn builtin(&mut self, b: Builtin, x: &RTerm, y: &RTerm) -> Result<bool, EngineError> {
        Ok(match b {
            Builtin::Is => {
                let v = self.eval(y)?;
                self.unify(x, &RTerm::Int(v))
            }
            Builtin::NotUnify => {
                let mark = self.mark();
                let unifies = self.unify(x, y);
                self.undo(mark);
                !unifies
            }
            Builtin::Lt => self.eval(x)? < self.eval(y)?,
            Builtin::Gt => self.eval(x)? > self.eval(y)?,
            Builtin::Le => self.eval(x)? <= self.eval(y)?,
            Builtin::Ge => self.eval(x)? >= self.eval(y)?,
            Builtin::ArithEq => self.eval(x)? == self.eval(y)?,
            Builtin::ArithNe => self.eval(x)? != self.eval(y)?,
        })
    }
}
