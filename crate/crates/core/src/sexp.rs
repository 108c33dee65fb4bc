//! Reader and printer for the s-expression syntax.
//!
//! ```text
//! a b x1        atoms
//! ?X            expression variable
//! @A            atom variable
//! %E            environment variable (letrec environments only)
//! 0 True        constants; (c) is a constant too
//! (lam w e)  (letrec ((w e) %E ..) e)  (perm ((w w) ..) e)  (f e ..)
//! ```
//!
//! A `;` starts a comment that runs to the end of the line.

use crate::name::{Atom, AtomVar, EnvVar, Fun, Var};
use crate::pattern::{Pat, Subst};
use crate::perm::Perm;
use crate::syntax::{Item, SPerm, Term, TierError, V, W};
use crate::term::Expr;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InputError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Tier(#[from] TierError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub enum Sx {
    Tok(String, Pos),
    List(Vec<Sx>, Pos),
}

impl Sx {
    pub fn pos(&self) -> Pos {
        match self {
            Sx::Tok(_, p) | Sx::List(_, p) => *p,
        }
    }
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError::Parse { line: pos.line, col: pos.col, msg: msg.into() })
}

/// Reads every top-level s-expression in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sx>, InputError> {
    let mut stack: Vec<(Vec<Sx>, Pos)> = vec![(Vec::new(), Pos { line: 1, col: 1 })];
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                if stack.len() == 1 {
                    return err(pos, "unbalanced ')'");
                }
                let (items, open) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sx::List(items, open));
            }
            _ => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                    col += 1;
                }
                stack.last_mut().unwrap().0.push(Sx::Tok(tok, pos));
                continue;
            }
        }
        col += 1;
    }
    if stack.len() > 1 {
        return err(stack.last().unwrap().1, "unclosed '('");
    }
    Ok(stack.pop().unwrap().0)
}

fn read_one(src: &str) -> Result<Sx, InputError> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => err(Pos { line: 1, col: 1 }, "empty input"),
        _ => err(all[1].pos(), "trailing input after the first expression"),
    }
}

fn is_atom_token(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '\'')
}

fn is_name_body(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn prefixed(tok: &str, prefix: char, pos: Pos) -> Result<Option<&str>, InputError> {
    match tok.strip_prefix(prefix) {
        Some(rest) if is_name_body(rest) => Ok(Some(rest)),
        Some(_) => err(pos, format!("malformed name '{tok}'")),
        None => Ok(None),
    }
}

fn parse_v(tok: &str, pos: Pos) -> Result<V, InputError> {
    if let Some(n) = prefixed(tok, '@', pos)? {
        Ok(V::Var(AtomVar::new(n)))
    } else if is_atom_token(tok) {
        Ok(V::Atom(Atom::new(tok)))
    } else {
        err(pos, format!("expected an atom or atom variable, found '{tok}'"))
    }
}

/// `a`, `@A` or `(perm ((w w) ..) v)`.
pub fn parse_w(sx: &Sx) -> Result<W, InputError> {
    match sx {
        Sx::Tok(t, p) => Ok(W { perm: SPerm::default(), v: parse_v(t, *p)? }),
        Sx::List(items, p) => match items.as_slice() {
            [Sx::Tok(k, _), swaps, inner] if k == "perm" => Ok(parse_w(inner)?.permute(&parse_swaps(swaps)?)),
            _ => err(*p, "expected an atom, atom variable or (perm ..) of one"),
        },
    }
}

fn parse_swaps(sx: &Sx) -> Result<SPerm, InputError> {
    let Sx::List(items, _) = sx else {
        return err(sx.pos(), "expected a list of swappings");
    };
    let mut out = Vec::new();
    for it in items {
        match it {
            Sx::List(pair, _) if pair.len() == 2 => out.push((parse_w(&pair[0])?, parse_w(&pair[1])?)),
            _ => return err(it.pos(), "expected a swapping (w w)"),
        }
    }
    Ok(SPerm(out))
}

pub fn parse_term_sx(sx: &Sx) -> Result<Term, InputError> {
    match sx {
        Sx::Tok(t, p) => {
            if let Some(n) = prefixed(t, '?', *p)? {
                Ok(Term::var(Var::new(n)))
            } else if t.starts_with('@') || is_atom_token(t) {
                Ok(Term::Atom(parse_w(sx)?))
            } else if t.starts_with('%') {
                err(*p, "environment variables may only occur in letrec environments")
            } else if is_name_body(t) {
                Ok(Term::App(Fun::new(t), Vec::new()))
            } else {
                err(*p, format!("unexpected token '{t}'"))
            }
        }
        Sx::List(items, p) => {
            let Some(Sx::Tok(head, hp)) = items.first() else {
                return err(*p, "expected a keyword or function symbol in head position");
            };
            let args = &items[1..];
            match head.as_str() {
                "lam" => match args {
                    [b, e] => Ok(Term::Lam(parse_w(b)?, Box::new(parse_term_sx(e)?))),
                    _ => err(*p, "lam takes a binder and a body"),
                },
                "letrec" => match args {
                    [Sx::List(env, _), body] => {
                        let mut out = Vec::new();
                        for it in env {
                            out.push(match it {
                                Sx::Tok(t, tp) => match prefixed(t, '%', *tp)? {
                                    Some(n) => Item::Env(EnvVar::new(n)),
                                    None => return err(*tp, "expected a binding or environment variable"),
                                },
                                Sx::List(b, _) if b.len() == 2 => Item::Bind(parse_w(&b[0])?, parse_term_sx(&b[1])?),
                                _ => return err(it.pos(), "expected a binding (w e)"),
                            });
                        }
                        Ok(Term::Letrec(out, Box::new(parse_term_sx(body)?)))
                    }
                    _ => err(*p, "letrec takes an environment list and a body"),
                },
                "perm" => match args {
                    [swaps, e] => Ok(parse_term_sx(e)?.permute(&parse_swaps(swaps)?)),
                    _ => err(*p, "perm takes a swapping list and an expression"),
                },
                f if is_name_body(f) => Ok(Term::App(Fun::new(f), args.iter().map(parse_term_sx).collect::<Result<_, _>>()?)),
                _ => err(*hp, format!("'{head}' is not a function symbol")),
            }
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term, InputError> {
    let t = parse_term_sx(&read_one(src)?)?;
    t.check_arities(&mut HashMap::new())?;
    Ok(t)
}

pub fn parse_expr(src: &str) -> Result<Expr, InputError> {
    Ok(parse_term(src)?.to_expr()?)
}

pub fn parse_ground(src: &str) -> Result<Expr, InputError> {
    Ok(parse_term(src)?.to_ground()?)
}

pub fn parse_pat(src: &str) -> Result<Pat, InputError> {
    Ok(parse_term(src)?.to_pat()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Unify,
    Match,
}

/// `(problem (eq s t) .. (fresh w e) ..)` or `(match (le s t) .. (fresh w e) ..)`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: ProblemKind,
    pub eqs: Vec<(Term, Term)>,
    pub fresh: Vec<(W, Term)>,
}

pub fn parse_problem(src: &str) -> Result<Problem, InputError> {
    let sx = read_one(src)?;
    let Sx::List(items, p) = &sx else {
        return err(sx.pos(), "expected (problem ..) or (match ..)");
    };
    let kind = match items.first() {
        Some(Sx::Tok(k, _)) if k == "problem" => ProblemKind::Unify,
        Some(Sx::Tok(k, _)) if k == "match" => ProblemKind::Match,
        _ => return err(*p, "expected (problem ..) or (match ..)"),
    };
    let eq_kw = if kind == ProblemKind::Unify { "eq" } else { "le" };
    let mut out = Problem { kind, eqs: Vec::new(), fresh: Vec::new() };
    for it in &items[1..] {
        match it {
            Sx::List(parts, _) if parts.len() == 3 => match &parts[0] {
                Sx::Tok(k, _) if k == eq_kw => out.eqs.push((parse_term_sx(&parts[1])?, parse_term_sx(&parts[2])?)),
                Sx::Tok(k, _) if k == "fresh" => out.fresh.push((parse_w(&parts[1])?, parse_term_sx(&parts[2])?)),
                _ => return err(it.pos(), format!("expected ({eq_kw} ..) or (fresh ..)")),
            },
            _ => return err(it.pos(), format!("expected ({eq_kw} ..) or (fresh ..)")),
        }
    }
    let mut sig = HashMap::new();
    for (s, t) in &out.eqs {
        s.check_arities(&mut sig)?;
        t.check_arities(&mut sig)?;
    }
    for (_, e) in &out.fresh {
        e.check_arities(&mut sig)?;
    }
    Ok(out)
}

/// One `v1 v2` pair per line; `#` starts a comment.
pub fn parse_edges(src: &str) -> Result<Vec<(String, String)>, InputError> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap();
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [a, b] => out.push((a.to_string(), b.to_string())),
            _ => return err(Pos { line: i + 1, col: 1 }, "expected two vertex names"),
        }
    }
    Ok(out)
}

fn write_v(f: &mut fmt::Formatter<'_>, v: &V) -> fmt::Result {
    match v {
        V::Atom(a) => write!(f, "{a}"),
        V::Var(a) => write!(f, "{a}"),
    }
}

fn write_swaps(f: &mut fmt::Formatter<'_>, p: &SPerm) -> fmt::Result {
    write!(f, "(")?;
    for (i, (a, b)) in p.0.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "({a} {b})")?;
    }
    write!(f, ")")
}

impl fmt::Display for W {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.perm.is_empty() {
            write_v(f, &self.v)
        } else {
            write!(f, "(perm ")?;
            write_swaps(f, &self.perm)?;
            write!(f, " ")?;
            write_v(f, &self.v)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for SPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_swaps(f, self)
    }
}

fn bare_constant(f: Fun) -> bool {
    let s = f.name();
    !is_atom_token(s) && is_name_body(s)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(w) => write!(f, "{w}"),
            Term::Susp(p, x) if p.is_empty() => write!(f, "{x}"),
            Term::Susp(p, x) => write!(f, "(perm {p} {x})"),
            Term::Lam(w, e) => write!(f, "(lam {w} {e})"),
            Term::App(g, args) if args.is_empty() && bare_constant(*g) => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "({g}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            Term::Letrec(env, body) => {
                write!(f, "(letrec (")?;
                for (i, it) in env.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    match it {
                        Item::Bind(w, e) => write!(f, "({w} {e})")?,
                        Item::Env(e) => write!(f, "{e}")?,
                    }
                }
                write!(f, ") {body})")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Term::from(self))
    }
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Term::from(self))
    }
}

/// `(solution (vars (?X e) ..) (envs (%E ((a e) ..)) ..))`
impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(solution (vars")?;
        for (x, e) in &self.vars {
            write!(f, " ({x} {e})")?;
        }
        write!(f, ") (envs")?;
        for (x, bs) in &self.envs {
            write!(f, " ({x} (")?;
            for (i, (a, e)) in bs.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "({a} {e})")?;
            }
            write!(f, "))")?;
        }
        write!(f, "))")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", SPerm::from_perm(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_all_forms() {
        let t = parse_term("(letrec ((a (f ?X b)) %E ((perm ((a b)) @A) 0)) (lam c (perm ((c d)) ?Y)))").unwrap();
        assert_eq!(t.to_string(), "(letrec ((a (f ?X b)) %E ((perm ((a b)) @A) 0)) (lam c (perm ((c d)) ?Y)))");
        assert_eq!(parse_term("(c)").unwrap().to_string(), "(c)");
        assert_eq!(parse_term("True").unwrap().to_string(), "True");
    }

    #[test]
    fn perm_pushes_into_structure() {
        let e = parse_expr("(perm ((x y)) (lam x (lam x a)))").unwrap();
        assert_eq!(e.to_string(), "(lam y (lam y a))");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_term("(f a\n  (lam a))") {
            Err(InputError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_term("(f a"), Err(InputError::Parse { line: 1, col: 1, .. })));
        assert!(matches!(parse_term("(f a) (g)"), Err(InputError::Parse { .. })));
        assert!(matches!(parse_term("(g (f a) (f a b))"), Err(InputError::Tier(TierError::Arity(..)))));
        assert!(matches!(parse_expr("(lam @A a)"), Err(InputError::Tier(TierError::AtomVar(_)))));
        assert!(parse_term("%E").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let e = parse_expr("; leading\n(f a ; inner\n b)").unwrap();
        assert_eq!(e.to_string(), "(f a b)");
    }

    #[test]
    fn problem_files() {
        let p = parse_problem("(problem (eq ?X (f a)) (fresh a ?X))").unwrap();
        assert_eq!(p.kind, ProblemKind::Unify);
        assert_eq!(p.eqs.len(), 1);
        assert_eq!(p.fresh.len(), 1);
        let m = parse_problem("(match (le ?X a))").unwrap();
        assert_eq!(m.kind, ProblemKind::Match);
        assert!(parse_problem("(match (eq ?X a))").is_err());
    }

    #[test]
    fn edge_lists() {
        let e = parse_edges("# triangle\n1 2\n2 3 # last\n\n3 1\n").unwrap();
        assert_eq!(e.len(), 3);
        assert!(parse_edges("1 2 3").is_err());
    }
}
