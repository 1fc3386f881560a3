use std::fmt::Write;

use super::{Clause, Goal, Program, Term};

/// Functors printed in infix position. Everything else uses functional
/// notation, with the functor quoted when it is not a plain name.
const INFIX: &[&str] = &[
    "=", "\\=", "<", ">", "=<", ">=", "=:=", "=\\=", "is", "+", "-", "*", "//", "/", "mod",
];

fn is_infix(name: &str, arity: usize) -> bool {
    arity == 2 && INFIX.contains(&name)
}

fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(super) fn render_atom(name: &str, out: &mut String) {
    if is_plain_atom(name) || name == "[]" {
        out.push_str(name);
        return;
    }
    out.push('\'');
    for c in name.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('\'');
}

/// Canonical text for a term. Lists are printed with bracket sugar and the
/// output parses back to an equal term.
pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Term::Atom(a) => render_atom(a, out),
        Term::Compound(f, args) if f == "." && args.len() == 2 => write_list(t, out),
        Term::Compound(f, args) if is_infix(f, args.len()) => {
            write_operand(&args[0], out);
            out.push(' ');
            out.push_str(f);
            out.push(' ');
            write_operand(&args[1], out);
        }
        Term::Compound(f, args) => {
            render_atom(f, out);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(a, out);
            }
            out.push(')');
        }
    }
}

fn write_operand(t: &Term, out: &mut String) {
    match t {
        Term::Compound(f, args) if is_infix(f, args.len()) => {
            out.push('(');
            write_term(t, out);
            out.push(')');
        }
        _ => write_term(t, out),
    }
}

fn write_list(t: &Term, out: &mut String) {
    out.push('[');
    let mut cur = t;
    let mut first = true;
    loop {
        match cur {
            Term::Compound(f, args) if f == "." && args.len() == 2 => {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                write_term(&args[0], out);
                cur = &args[1];
            }
            Term::Atom(a) if a == "[]" => break,
            tail => {
                out.push('|');
                write_term(tail, out);
                break;
            }
        }
    }
    out.push(']');
}

pub(super) fn render_goal(g: &Goal) -> String {
    let mut out = String::new();
    write_goal(g, &mut out);
    out
}

fn write_goal(g: &Goal, out: &mut String) {
    match g {
        Goal::True => out.push_str("true"),
        Goal::Fail => out.push_str("fail"),
        Goal::Call(key, args) => {
            render_atom(&key.name, out);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(a, out);
                }
                out.push(')');
            }
        }
        Goal::Unify(a, b) => {
            write_operand(a, out);
            out.push_str(" = ");
            write_operand(b, out);
        }
        Goal::Builtin(b, args) => {
            write_operand(&args[0], out);
            out.push(' ');
            out.push_str(b.name());
            out.push(' ');
            write_operand(&args[1], out);
        }
        Goal::Conj(gs) => {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_goal(g, out);
            }
        }
        Goal::Disj(gs) => {
            out.push('(');
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ; ");
                }
                write_goal(g, out);
            }
            out.push(')');
        }
        Goal::Ite(c, t, e) => {
            out.push('(');
            write_goal(c, out);
            out.push_str(" -> ");
            write_goal(t, out);
            out.push_str(" ; ");
            write_goal(e, out);
            out.push(')');
        }
    }
}

pub(super) fn render_clause(c: &Clause) -> String {
    let mut out = String::new();
    write_goal(
        &Goal::Call(c.key(), c.args.clone()),
        &mut out,
    );
    match &c.body {
        Goal::True => {}
        Goal::Conj(gs) => {
            out.push_str(" :-");
            for (i, g) in gs.iter().enumerate() {
                out.push_str(if i == 0 { "\n    " } else { ",\n    " });
                write_goal(g, &mut out);
            }
        }
        body => {
            out.push_str(" :-\n    ");
            write_goal(body, &mut out);
        }
    }
    out.push('.');
    out
}

pub(super) fn render_program(p: &Program) -> String {
    let mut out = String::new();
    for (key, det) in &p.pragmas {
        out.push_str(":- det(");
        render_atom(&key.name, &mut out);
        let _ = writeln!(out, "/{}, {}).", key.arity, det.as_str());
    }
    for clauses in p.predicates.values() {
        for c in clauses {
            out.push_str(&render_clause(c));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_and_lists() {
        assert_eq!(render_term(&Term::atom("nil")), "nil");
        assert_eq!(render_term(&Term::list([Term::Int(1), Term::Int(2)])), "[1, 2]");
        assert_eq!(render_term(&Term::nil()), "[]");
        assert_eq!(
            render_term(&Term::cons(Term::Int(1), Term::var("T"))),
            "[1|T]"
        );
        assert_eq!(render_term(&Term::atom("hello world")), "'hello world'");
        assert_eq!(render_term(&Term::atom("it's")), "'it\\'s'");
    }

    #[test]
    fn compounds_and_operators() {
        let t = Term::compound(
            "f",
            vec![Term::var("X"), Term::compound("g", vec![Term::var("Y")])],
        );
        assert_eq!(render_term(&t), "f(X, g(Y))");
        let e = Term::compound(
            "*",
            vec![
                Term::compound("+", vec![Term::var("A"), Term::Int(1)]),
                Term::Int(-2),
            ],
        );
        assert_eq!(render_term(&e), "(A + 1) * -2");
        assert_eq!(
            render_term(&Term::compound(",", vec![Term::atom("a"), Term::atom("b")])),
            "','(a, b)"
        );
    }
}
