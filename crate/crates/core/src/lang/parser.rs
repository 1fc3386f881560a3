//! Tokenizer and operator-precedence parser.

use indexmap::IndexMap;

use super::{Builtin, Clause, Goal, LangError, PredKey, Program, Term};
use crate::trace_model::Determinism;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    /// Unquoted name or symbol-char atom; may act as an operator.
    Name(String),
    /// Quoted atom; never an operator.
    Quoted(String),
    Var(String),
    Int(i64),
    Open,
    Close,
    OpenList,
    CloseList,
    Bar,
    Comma,
    End,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// Whitespace or a comment separates this token from the previous one.
    layout_before: bool,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

fn is_symbol_char(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err<T>(&self, line: usize, column: usize, message: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    /// Skips whitespace and comments, reporting whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, LangError> {
        let mut skipped = false;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                    skipped = true;
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                    skipped = true;
                }
                Some('/') if self.peek2() == Some('*') => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    self.bump();
                    let mut prev = ' ';
                    loop {
                        match self.bump() {
                            None => return self.err(line, column, "unterminated block comment"),
                            Some('/') if prev == '*' => break,
                            Some(c) => prev = c,
                        }
                    }
                    skipped = true;
                }
                _ => return Ok(skipped),
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>, LangError> {
        let mut out = Vec::new();
        let mut layout_before = true;
        loop {
            layout_before |= self.skip_layout()?;
            let (line, column) = (self.line, self.column);
            let push = |out: &mut Vec<Token>, tok| {
                out.push(Token {
                    tok,
                    line,
                    column,
                    layout_before,
                })
            };
            let Some(c) = self.peek() else {
                push(&mut out, Tok::Eof);
                return Ok(out);
            };
            let start = self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len());
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::Open
                }
                ')' => {
                    self.bump();
                    Tok::Close
                }
                '[' => {
                    self.bump();
                    Tok::OpenList
                }
                ']' => {
                    self.bump();
                    Tok::CloseList
                }
                '|' => {
                    self.bump();
                    Tok::Bar
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '!' | ';' => {
                    self.bump();
                    Tok::Name(c.to_string())
                }
                '\'' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None => return self.err(line, column, "unterminated quoted atom"),
                            Some('\'') if self.peek() == Some('\'') => {
                                self.bump();
                                s.push('\'');
                            }
                            Some('\'') => break,
                            Some('\\') => match self.bump() {
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some(e @ ('\\' | '\'' | '"')) => s.push(e),
                                _ => return self.err(self.line, self.column, "bad escape in quoted atom"),
                            },
                            Some(ch) => s.push(ch),
                        }
                    }
                    Tok::Quoted(s)
                }
                c if c.is_ascii_digit() => {
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        self.bump();
                    }
                    let end = self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len());
                    match self.src[start..end].parse::<i64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => return self.err(line, column, "integer literal out of range"),
                    }
                }
                c if c.is_alphabetic() || c == '_' => {
                    while matches!(self.peek(), Some(d) if d.is_alphanumeric() || d == '_') {
                        self.bump();
                    }
                    let end = self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len());
                    let word = self.src[start..end].to_string();
                    if c.is_uppercase() || c == '_' {
                        Tok::Var(word)
                    } else {
                        Tok::Name(word)
                    }
                }
                c if is_symbol_char(c) => {
                    let mut word = String::new();
                    while let Some(d) = self.peek() {
                        if !is_symbol_char(d) {
                            break;
                        }
                        // A '.' followed by layout or end of input terminates the clause.
                        if d == '.' && matches!(self.peek2(), None | Some('%')) || d == '.' && self.peek2().is_some_and(char::is_whitespace) {
                            break;
                        }
                        word.push(d);
                        self.bump();
                    }
                    if word.is_empty() {
                        self.bump();
                        Tok::End
                    } else {
                        Tok::Name(word)
                    }
                }
                other => return self.err(line, column, format!("unexpected character `{other}`")),
            };
            push(&mut out, tok);
            layout_before = false;
        }
    }
}

#[derive(Clone, Copy)]
struct InfixOp {
    prec: u32,
    left_max: u32,
    right_max: u32,
}

fn infix_op(name: &str) -> Option<InfixOp> {
    let xfx = |p| InfixOp { prec: p, left_max: p - 1, right_max: p - 1 };
    let xfy = |p| InfixOp { prec: p, left_max: p - 1, right_max: p };
    let yfx = |p| InfixOp { prec: p, left_max: p, right_max: p - 1 };
    Some(match name {
        ":-" => xfx(1200),
        ";" => xfy(1100),
        "->" => xfy(1050),
        "," => xfy(1000),
        "=" | "\\=" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" | "is" => xfx(700),
        "+" | "-" => yfx(500),
        "*" | "//" | "/" | "mod" => yfx(400),
        _ => return None,
    })
}

const NEG_PREC: u32 = 200;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at<T>(&self, tok: &Token, message: impl Into<String>) -> Result<T, LangError> {
        let message = message.into();
        let message = if tok.tok == Tok::Eof && !message.contains("end of input") {
            format!("{message} (at end of input)")
        } else {
            message
        };
        Err(LangError::Parse {
            line: tok.line,
            column: tok.column,
            message,
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LangError> {
        let t = self.next();
        if t.tok == want {
            Ok(())
        } else {
            self.err_at(&t, format!("expected {what}, found {}", describe(&t.tok)))
        }
    }

    fn at_term_start(&self) -> bool {
        match &self.peek().tok {
            Tok::Name(n) => infix_op(n).is_none() || self.peek_at(1).tok == Tok::Open,
            Tok::Quoted(_) | Tok::Var(_) | Tok::Int(_) | Tok::Open | Tok::OpenList => true,
            _ => false,
        }
    }

    fn parse(&mut self, max: u32) -> Result<Term, LangError> {
        let (mut left, mut left_prec) = self.parse_primary(max)?;
        loop {
            let name = match &self.peek().tok {
                Tok::Name(n) => n.clone(),
                Tok::Comma => ",".to_string(),
                _ => break,
            };
            let Some(op) = infix_op(&name) else { break };
            if op.prec > max || left_prec > op.left_max {
                break;
            }
            self.next();
            let right = self.parse(op.right_max)?;
            left = Term::Compound(name, vec![left, right]);
            left_prec = op.prec;
        }
        Ok(left)
    }

    fn parse_primary(&mut self, max: u32) -> Result<(Term, u32), LangError> {
        let t = self.next();
        match t.tok.clone() {
            Tok::Int(i) => Ok((Term::Int(i), 0)),
            Tok::Var(v) => Ok((Term::Var(v), 0)),
            Tok::Open => {
                let inner = self.parse(1200)?;
                self.expect(Tok::Close, "`)`")?;
                Ok((inner, 0))
            }
            Tok::OpenList => {
                if self.peek().tok == Tok::CloseList {
                    self.next();
                    return Ok((Term::nil(), 0));
                }
                let mut items = vec![self.parse(999)?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    items.push(self.parse(999)?);
                }
                let tail = if self.peek().tok == Tok::Bar {
                    self.next();
                    self.parse(999)?
                } else {
                    Term::nil()
                };
                self.expect(Tok::CloseList, "`]` or `,`")?;
                let list = items
                    .into_iter()
                    .rev()
                    .fold(tail, |tail, head| Term::cons(head, tail));
                Ok((list, 0))
            }
            Tok::Quoted(name) => {
                if self.peek().tok == Tok::Open && !self.peek().layout_before {
                    Ok((self.parse_args(name)?, 0))
                } else {
                    Ok((Term::Atom(name), 0))
                }
            }
            Tok::Name(name) => {
                let next = self.peek().clone();
                if next.tok == Tok::Open && !next.layout_before {
                    return Ok((self.parse_args(name)?, 0));
                }
                if name == "-" {
                    if let Tok::Int(i) = next.tok {
                        if !next.layout_before {
                            self.next();
                            return Ok((Term::Int(-i), 0));
                        }
                    }
                    if max >= NEG_PREC && self.at_term_start() {
                        let operand = self.parse(NEG_PREC)?;
                        return Ok((Term::Compound(name, vec![operand]), NEG_PREC));
                    }
                }
                let ends_operand = matches!(
                    next.tok,
                    Tok::Close | Tok::Comma | Tok::CloseList | Tok::Bar | Tok::End | Tok::Eof
                );
                if infix_op(&name).is_some() && !ends_operand {
                    return self.err_at(&t, format!("unexpected operator `{name}`"));
                }
                Ok((Term::Atom(name), 0))
            }
            other => self.err_at(&t, format!("unexpected {}", describe(&other))),
        }
    }

    fn parse_args(&mut self, name: String) -> Result<Term, LangError> {
        self.expect(Tok::Open, "`(`")?;
        let mut args = vec![self.parse(999)?];
        while self.peek().tok == Tok::Comma {
            self.next();
            args.push(self.parse(999)?);
        }
        self.expect(Tok::Close, "`)` or `,`")?;
        Ok(Term::Compound(name, args))
    }

    /// Parses one `.`-terminated term; `None` at end of input.
    fn sentence(&mut self) -> Result<Option<(Term, Token)>, LangError> {
        let start = self.peek().clone();
        if start.tok == Tok::Eof {
            return Ok(None);
        }
        let term = if start.tok == Tok::Name(":-".to_string()) {
            self.next();
            let body = self.parse(1199)?;
            Term::Compound(":-".to_string(), vec![body])
        } else {
            self.parse(1200)?
        };
        let end = self.next();
        if end.tok != Tok::End {
            return self.err_at(&end, format!("expected `.`, found {}", describe(&end.tok)));
        }
        Ok(Some((term, start)))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) | Tok::Quoted(n) => format!("`{n}`"),
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Int(i) => format!("integer {i}"),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::OpenList => "`[`".into(),
        Tok::CloseList => "`]`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "`.`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn term_to_goal(t: Term, at: &Token) -> Result<Goal, LangError> {
    let bad = |msg: String| {
        Err(LangError::Parse {
            line: at.line,
            column: at.column,
            message: msg,
        })
    };
    match t {
        Term::Var(v) => bad(format!("variable `{v}` used as a goal")),
        Term::Int(i) => bad(format!("integer {i} used as a goal")),
        Term::Atom(a) if a == "true" => Ok(Goal::True),
        Term::Atom(a) if a == "fail" || a == "false" => Ok(Goal::Fail),
        Term::Atom(a) => Ok(Goal::Call(PredKey::new(&a, 0), Vec::new())),
        Term::Compound(f, args) => {
            let mut args = args;
            match (f.as_str(), args.len()) {
                (",", 2) => {
                    let mut goals = Vec::new();
                    for a in args {
                        match term_to_goal(a, at)? {
                            Goal::Conj(inner) => goals.extend(inner),
                            g => goals.push(g),
                        }
                    }
                    Ok(Goal::Conj(goals))
                }
                (";", 2) => {
                    let right = args.pop().unwrap();
                    let left = args.pop().unwrap();
                    if let Term::Compound(f, mut ite) = left {
                        if f == "->" && ite.len() == 2 {
                            let then = ite.pop().unwrap();
                            let cond = ite.pop().unwrap();
                            return Ok(Goal::Ite(
                                Box::new(term_to_goal(cond, at)?),
                                Box::new(term_to_goal(then, at)?),
                                Box::new(term_to_goal(right, at)?),
                            ));
                        }
                        return disjunction(Term::Compound(f, ite), right, at);
                    }
                    disjunction(left, right, at)
                }
                ("->", 2) => {
                    let then = args.pop().unwrap();
                    let cond = args.pop().unwrap();
                    Ok(Goal::Ite(
                        Box::new(term_to_goal(cond, at)?),
                        Box::new(term_to_goal(then, at)?),
                        Box::new(Goal::Fail),
                    ))
                }
                ("=", 2) => {
                    let b = args.pop().unwrap();
                    let a = args.pop().unwrap();
                    Ok(Goal::Unify(a, b))
                }
                (":-", _) => bad("unexpected `:-` inside a goal".into()),
                (name, n) => match Builtin::from_name(name, n) {
                    Some(b) => Ok(Goal::Builtin(b, args)),
                    None => Ok(Goal::Call(PredKey::new(name, n as u32), args)),
                },
            }
        }
    }
}

/// Right-nested `;` chains become one disjunction; a right operand that is
/// itself an if-then-else stays a single branch.
fn disjunction(left: Term, right: Term, at: &Token) -> Result<Goal, LangError> {
    let mut branches = vec![term_to_goal(left, at)?];
    let mut rest = right;
    loop {
        match rest {
            Term::Compound(f, mut args) if f == ";" && args.len() == 2 => {
                let is_ite = matches!(&args[0], Term::Compound(g, a) if g == "->" && a.len() == 2);
                if is_ite {
                    branches.push(term_to_goal(Term::Compound(f, args), at)?);
                    break;
                }
                let r = args.pop().unwrap();
                let l = args.pop().unwrap();
                branches.push(term_to_goal(l, at)?);
                rest = r;
            }
            other => {
                branches.push(term_to_goal(other, at)?);
                break;
            }
        }
    }
    Ok(Goal::Disj(branches))
}

fn pragma(body: Term, at: &Token) -> Result<(PredKey, Determinism), LangError> {
    let bad = |msg: &str| {
        Err(LangError::Parse {
            line: at.line,
            column: at.column,
            message: msg.to_string(),
        })
    };
    let Term::Compound(f, args) = body else {
        return bad("unsupported directive; expected det(name/arity, determinism)");
    };
    if f != "det" || args.len() != 2 {
        return bad("unsupported directive; expected det(name/arity, determinism)");
    }
    let key = match &args[0] {
        Term::Compound(slash, ka) if slash == "/" && ka.len() == 2 => match (&ka[0], &ka[1]) {
            (Term::Atom(n), Term::Int(a)) if *a >= 0 => PredKey::new(n, *a as u32),
            _ => return bad("pragma predicate must be name/arity"),
        },
        _ => return bad("pragma predicate must be name/arity"),
    };
    let det = match &args[1] {
        Term::Atom(d) => match d.parse::<Determinism>() {
            Ok(det) => det,
            Err(e) => return bad(&e),
        },
        _ => return bad("determinism must be an atom"),
    };
    Ok((key, det))
}

fn tokenize(source: &str) -> Result<Parser, LangError> {
    Ok(Parser {
        toks: Lexer::new(source).tokens()?,
        pos: 0,
    })
}

/// Parses a whole program: clauses in source order plus determinism pragmas.
pub fn parse_program(source: &str) -> Result<Program, LangError> {
    let mut p = tokenize(source)?;
    let mut predicates: IndexMap<PredKey, Vec<Clause>> = IndexMap::new();
    let mut pragmas = IndexMap::new();
    while let Some((term, start)) = p.sentence()? {
        match term {
            Term::Compound(f, mut args) if f == ":-" && args.len() == 1 => {
                let (key, det) = pragma(args.pop().unwrap(), &start)?;
                if pragmas.contains_key(&key) {
                    return Err(LangError::DuplicatePragma {
                        predicate: key,
                        line: start.line,
                    });
                }
                pragmas.insert(key, det);
            }
            term => {
                let clause = clause(term, &start)?;
                predicates.entry(clause.key()).or_default().push(clause);
            }
        }
    }
    Ok(Program {
        module: "user".to_string(),
        predicates,
        pragmas,
    })
}

fn clause(term: Term, at: &Token) -> Result<Clause, LangError> {
    let (head, body) = match term {
        Term::Compound(f, mut args) if f == ":-" && args.len() == 2 => {
            let body = args.pop().unwrap();
            (args.pop().unwrap(), term_to_goal(body, at)?)
        }
        t => (t, Goal::True),
    };
    let (name, args) = match head {
        Term::Atom(n) => (n, Vec::new()),
        Term::Compound(n, args) => (n, args),
        _ => {
            return Err(LangError::Parse {
                line: at.line,
                column: at.column,
                message: "clause head must be an atom or compound term".into(),
            })
        }
    };
    let reserved = matches!((name.as_str(), args.len()), ("true" | "fail" | "false", 0) | (",", 2) | (";", 2) | ("->", 2) | ("=", 2))
        || Builtin::from_name(&name, args.len()).is_some();
    if reserved {
        return Err(LangError::Parse {
            line: at.line,
            column: at.column,
            message: format!("cannot redefine built-in {name}/{}", args.len()),
        });
    }
    Ok(Clause { name, args, body })
}

/// Parses a single `.`-terminated goal.
pub fn parse_query(source: &str) -> Result<Goal, LangError> {
    let mut p = tokenize(source)?;
    let Some((term, start)) = p.sentence()? else {
        let eof = p.peek().clone();
        return p.err_at(&eof, "expected a query");
    };
    if let Term::Compound(f, _) = &term {
        if f == ":-" {
            return p.err_at(&start, "directives are not queries");
        }
    }
    let goal = term_to_goal(term, &start)?;
    let trailing = p.peek().clone();
    if trailing.tok != Tok::Eof {
        return p.err_at(&trailing, "unexpected input after query");
    }
    Ok(goal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_program() {
        let p = parse_program("p.").unwrap();
        assert_eq!(p.predicates.len(), 1);
        let clauses = p.clauses(&PredKey::new("p", 0)).unwrap();
        assert_eq!(clauses[0].body, Goal::True);
    }

    #[test]
    fn incomplete_rule_is_error_at_end() {
        let err = parse_program("p :-").unwrap_err();
        match err {
            LangError::Parse { line, column, message } => {
                assert_eq!((line, column), (1, 5));
                assert!(message.contains("end of input"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn queries() {
        assert_eq!(
            parse_query("main.").unwrap(),
            Goal::Call(PredKey::new("main", 0), vec![])
        );
        let q = parse_query("queen([1,2,3,4,5], Out).").unwrap();
        assert_eq!(
            q,
            Goal::Call(
                PredKey::new("queen", 2),
                vec![
                    Term::list((1..=5).map(Term::Int).collect::<Vec<_>>()),
                    Term::var("Out")
                ]
            )
        );
        assert!(matches!(parse_query("X is 1 +."), Err(LangError::Parse { .. })));
        assert!(parse_query("").is_err());
        assert!(parse_query("a. b.").is_err());
    }

    #[test]
    fn control_constructs() {
        let g = parse_query("(a ; b ; c).").unwrap();
        assert_eq!(
            g,
            Goal::Disj(vec![
                Goal::Call(PredKey::new("a", 0), vec![]),
                Goal::Call(PredKey::new("b", 0), vec![]),
                Goal::Call(PredKey::new("c", 0), vec![]),
            ])
        );
        let g = parse_query("(X = 1 -> fail ; X = 2 -> fail ; true).").unwrap();
        let Goal::Ite(_, t, e) = g else { panic!() };
        assert_eq!(*t, Goal::Fail);
        assert!(matches!(*e, Goal::Ite(_, _, ref e2) if **e2 == Goal::True));

        let g = parse_query("a, (b, c), d.").unwrap();
        assert!(matches!(g, Goal::Conj(ref gs) if gs.len() == 4));

        let g = parse_query("(a ; c -> d ; e).").unwrap();
        let Goal::Disj(bs) = g else { panic!() };
        assert_eq!(bs.len(), 2);
        assert!(matches!(bs[1], Goal::Ite(..)));

        assert!(matches!(parse_query("(a -> b).").unwrap(), Goal::Ite(_, _, ref e) if **e == Goal::Fail));
    }

    #[test]
    fn arithmetic_precedence() {
        let g = parse_query("X is 1 + 2 * 3 - 4.").unwrap();
        let Goal::Builtin(Builtin::Is, args) = g else { panic!() };
        assert_eq!(args[1].to_string(), "(1 + (2 * 3)) - 4");
        let g = parse_query("X is N - -1.").unwrap();
        let Goal::Builtin(_, args) = g else { panic!() };
        assert_eq!(args[1], Term::compound("-", vec![Term::var("N"), Term::Int(-1)]));
        let g = parse_query("X = -(1).").unwrap();
        assert_eq!(g, Goal::Unify(Term::var("X"), Term::compound("-", vec![Term::Int(1)])));
    }

    #[test]
    fn pragmas_and_duplicates() {
        let p = parse_program(":- det(p/1, semidet).\np(1).").unwrap();
        assert_eq!(p.determinism(&PredKey::new("p", 1)), Determinism::Semidet);
        assert_eq!(p.determinism(&PredKey::new("q", 0)), Determinism::Unknown);
        let err = parse_program(":- det(p/1, det).\n:- det(p/1, nondet).").unwrap_err();
        assert!(matches!(err, LangError::DuplicatePragma { line: 2, .. }));
        assert!(parse_program(":- det(p/1, often).").is_err());
        assert!(parse_program(":- module(x).").is_err());
    }

    #[test]
    fn comments_quoted_atoms_and_positions() {
        let p = parse_program("% header\np('a b'). /* block */ q([H|T]) :- p(H), q(T).\n").unwrap();
        assert_eq!(p.predicates.len(), 2);
        let err = parse_program("p.\nq :- r(.\n").unwrap_err();
        assert!(matches!(err, LangError::Parse { line: 2, .. }), "{err:?}");
        assert!(parse_program("X :- true.").is_err());
        assert!(parse_program("true.").is_err());
        assert!(parse_program("p :- X.").is_err());
    }

    #[test]
    fn list_forms() {
        let g = parse_query("X = [1, 2|T].").unwrap();
        assert_eq!(
            g,
            Goal::Unify(
                Term::var("X"),
                Term::cons(Term::Int(1), Term::cons(Term::Int(2), Term::var("T")))
            )
        );
        assert!(parse_query("X = [1,.").is_err());
    }
}
