//! Name-keyed substitutions over source terms.
//!
//! This is the reference unifier: a plain functional algorithm over
//! [`Term`]s, independent of the trailed store the solver uses.

use std::collections::{BTreeMap, HashMap};

use super::store::{CTerm, RTerm, Store};
use super::EngineError;
use crate::lang::{Builtin, Term};

/// Variable name → bound term. Bindings may refer to other bound variables;
/// [`Substitution::apply`] resolves chains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    /// Binds `var` without any check; used to seed substitutions.
    pub fn bind(mut self, var: &str, t: Term) -> Self {
        self.bindings.insert(var.to_string(), t);
        self
    }

    fn walk<'t>(&'t self, mut t: &'t Term) -> &'t Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Replaces every bound variable, transitively.
    pub fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
            other => other.clone(),
        }
    }

    /// Every binding fully resolved.
    pub fn resolved(&self) -> BTreeMap<String, Term> {
        self.bindings
            .keys()
            .map(|k| (k.clone(), self.apply(&Term::Var(k.clone()))))
            .collect()
    }
}

/// Most general unifier of `a` and `b` extending `s`, without occurs check.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let mut out = s.clone();
    if unify_into(a, b, &mut out) {
        Some(out)
    } else {
        None
    }
}

fn unify_into(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let a = s.walk(a).clone();
    let b = s.walk(b).clone();
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), _) => {
            s.bindings.insert(x.clone(), b);
            true
        }
        (_, Term::Var(y)) => {
            s.bindings.insert(y.clone(), a);
            true
        }
        (Term::Atom(x), Term::Atom(y)) => x == y,
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, s))
        }
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinOutcome {
    Succeeds(Substitution),
    Fails,
}

/// Evaluates a builtin (`=`, `is`, `\=`, or an integer comparison) under `s`.
///
/// Runs the solver's own builtin code, so the semantics match what
/// programs observe.
pub fn eval_builtin(name: &str, args: &[Term], s: &Substitution) -> Result<BuiltinOutcome, EngineError> {
    let builtin = match (name, args.len()) {
        ("=", 2) => None,
        _ => Some(Builtin::from_name(name, args.len()).ok_or_else(|| {
            EngineError::UndefinedPredicate(crate::lang::PredKey::new(name, args.len() as u32))
        })?),
    };

    let mut names: HashMap<String, usize> = HashMap::new();
    let mut next = 0usize;
    let cargs: Vec<CTerm> = args.iter().map(|a| CTerm::compile(a, &mut names, &mut next)).collect();
    for v in s.bindings.keys() {
        CTerm::compile(&Term::Var(v.clone()), &mut names, &mut next);
    }
    let seeded: Vec<(String, CTerm)> = s
        .iter()
        .map(|(v, t)| (v.clone(), CTerm::compile(t, &mut names, &mut next)))
        .collect();

    let mut store = Store::default();
    let base = store.alloc(next);
    for (v, t) in &seeded {
        let var = RTerm::Var(base + names[v]);
        let bound = t.instantiate(base);
        if !store.unify(&var, &bound) {
            return Ok(BuiltinOutcome::Fails);
        }
    }
    let rargs: Vec<RTerm> = cargs.iter().map(|c| c.instantiate(base)).collect();
    let ok = match builtin {
        None => store.unify(&rargs[0], &rargs[1]),
        Some(b) => store.builtin(b, &rargs[0], &rargs[1])?,
    };
    if !ok {
        return Ok(BuiltinOutcome::Fails);
    }
    let mut out = Substitution::new();
    let mut by_index: Vec<(&String, &usize)> = names.iter().collect();
    by_index.sort_by_key(|(_, i)| **i);
    for (name, idx) in by_index {
        let resolved = store.resolve(&RTerm::Var(base + idx));
        if resolved != Term::Var(format!("_G{}", base + idx)) {
            out.bindings.insert(name.clone(), resolved);
        }
    }
    Ok(BuiltinOutcome::Succeeds(out))
}
