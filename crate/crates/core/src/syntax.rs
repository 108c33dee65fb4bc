//! The most general surface syntax: expressions whose permutations may
//! mention atom variables and whose letrec environments may contain
//! environment variables. Every tier is a restriction of [`Term`].

use crate::name::{Atom, AtomVar, EnvVar, Fun, Var};
use crate::pattern::{PBind, Pat};
use crate::perm::Perm;
use crate::term::Expr;
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum V {
    Atom(Atom),
    Var(AtomVar),
}

/// `π·V`
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct W {
    pub perm: SPerm,
    pub v: V,
}

/// A swapping list `(w1 w2)∘(w3 w4)∘..`. The rightmost swapping acts first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SPerm(pub Vec<(W, W)>);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Atom(W),
    Susp(SPerm, Var),
    Lam(W, Box<Term>),
    App(Fun, Vec<Term>),
    Letrec(Vec<Item>, Box<Term>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Item {
    Bind(W, Term),
    Env(EnvVar),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TierError {
    #[error("atom variable {0} is not allowed here")]
    AtomVar(AtomVar),
    #[error("environment variable {0} is not allowed here")]
    EnvVar(EnvVar),
    #[error("expression variable {0} is not allowed in a ground expression")]
    ExprVar(Var),
    #[error("function {0} used with arities {1} and {2}")]
    Arity(Fun, usize, usize),
    #[error("atom {0} is bound twice in one letrec environment")]
    DuplicateBinder(Atom),
}

impl W {
    pub fn atom(a: Atom) -> W {
        W { perm: SPerm::default(), v: V::Atom(a) }
    }

    pub fn avar(a: AtomVar) -> W {
        W { perm: SPerm::default(), v: V::Var(a) }
    }

    pub fn permute(&self, p: &SPerm) -> W {
        W { perm: p.compose(&self.perm), v: self.v }
    }

    /// The atom this stands for, when no atom variable is involved.
    pub fn eval(&self) -> Option<Atom> {
        match self.v {
            V::Atom(a) => Some(self.perm.eval()?.apply(a)),
            V::Var(_) => None,
        }
    }

    pub fn instantiate(&self, m: &HashMap<AtomVar, Atom>) -> W {
        let v = match self.v {
            V::Var(a) => m.get(&a).map_or(self.v, |b| V::Atom(*b)),
            v => v,
        };
        W { perm: self.perm.instantiate(m), v }
    }

    fn collect(&self, atoms: &mut BTreeSet<Atom>, avars: &mut BTreeSet<AtomVar>) {
        match self.v {
            V::Atom(a) => {
                atoms.insert(a);
            }
            V::Var(a) => {
                avars.insert(a);
            }
        }
        self.perm.collect(atoms, avars)
    }
}

impl SPerm {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn swap(a: W, b: W) -> SPerm {
        SPerm(vec![(a, b)])
    }

    pub fn from_perm(p: &Perm) -> SPerm {
        SPerm(p.swaps().into_iter().map(|(a, b)| (W::atom(a), W::atom(b))).collect())
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &SPerm) -> SPerm {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        SPerm(v)
    }

    pub fn inverse(&self) -> SPerm {
        SPerm(self.0.iter().rev().cloned().collect())
    }

    pub fn eval(&self) -> Option<Perm> {
        let mut p = Perm::id();
        for (a, b) in &self.0 {
            p = p.compose(&Perm::swap(a.eval()?, b.eval()?));
        }
        Some(p)
    }

    pub fn instantiate(&self, m: &HashMap<AtomVar, Atom>) -> SPerm {
        SPerm(self.0.iter().map(|(a, b)| (a.instantiate(m), b.instantiate(m))).collect())
    }

    fn collect(&self, atoms: &mut BTreeSet<Atom>, avars: &mut BTreeSet<AtomVar>) {
        for (a, b) in &self.0 {
            a.collect(atoms, avars);
            b.collect(atoms, avars);
        }
    }
}

impl Term {
    pub fn var(x: Var) -> Term {
        Term::Susp(SPerm::default(), x)
    }

    /// Pushes a permutation down to the leaves.
    pub fn permute(&self, p: &SPerm) -> Term {
        if p.is_empty() {
            return self.clone();
        }
        match self {
            Term::Atom(w) => Term::Atom(w.permute(p)),
            Term::Susp(q, x) => Term::Susp(p.compose(q), *x),
            Term::Lam(w, e) => Term::Lam(w.permute(p), Box::new(e.permute(p))),
            Term::App(f, args) => Term::App(*f, args.iter().map(|e| e.permute(p)).collect()),
            Term::Letrec(env, body) => Term::Letrec(
                env.iter()
                    .map(|it| match it {
                        Item::Bind(w, e) => Item::Bind(w.permute(p), e.permute(p)),
                        Item::Env(e) => Item::Env(*e),
                    })
                    .collect(),
                Box::new(body.permute(p)),
            ),
        }
    }

    pub fn instantiate(&self, m: &HashMap<AtomVar, Atom>) -> Term {
        match self {
            Term::Atom(w) => Term::Atom(w.instantiate(m)),
            Term::Susp(p, x) => Term::Susp(p.instantiate(m), *x),
            Term::Lam(w, e) => Term::Lam(w.instantiate(m), Box::new(e.instantiate(m))),
            Term::App(f, args) => Term::App(*f, args.iter().map(|e| e.instantiate(m)).collect()),
            Term::Letrec(env, body) => Term::Letrec(
                env.iter()
                    .map(|it| match it {
                        Item::Bind(w, e) => Item::Bind(w.instantiate(m), e.instantiate(m)),
                        Item::Env(e) => Item::Env(*e),
                    })
                    .collect(),
                Box::new(body.instantiate(m)),
            ),
        }
    }

    /// Atoms and atom variables occurring anywhere.
    pub fn names(&self) -> (BTreeSet<Atom>, BTreeSet<AtomVar>) {
        let mut atoms = BTreeSet::new();
        let mut avars = BTreeSet::new();
        self.collect(&mut atoms, &mut avars);
        (atoms, avars)
    }

    fn collect(&self, atoms: &mut BTreeSet<Atom>, avars: &mut BTreeSet<AtomVar>) {
        match self {
            Term::Atom(w) => w.collect(atoms, avars),
            Term::Susp(p, _) => p.collect(atoms, avars),
            Term::Lam(w, e) => {
                w.collect(atoms, avars);
                e.collect(atoms, avars)
            }
            Term::App(_, args) => args.iter().for_each(|e| e.collect(atoms, avars)),
            Term::Letrec(env, body) => {
                for it in env {
                    if let Item::Bind(w, e) = it {
                        w.collect(atoms, avars);
                        e.collect(atoms, avars);
                    }
                }
                body.collect(atoms, avars)
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::Susp(_, x) = t {
                out.insert(*x);
            }
        });
        out
    }

    pub fn env_vars(&self) -> BTreeSet<EnvVar> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::Letrec(env, _) = t {
                for it in env {
                    if let Item::Env(e) = it {
                        out.insert(*e);
                    }
                }
            }
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        match self {
            Term::Atom(_) | Term::Susp(..) => {}
            Term::Lam(_, e) => e.walk(f),
            Term::App(_, args) => args.iter().for_each(|e| e.walk(f)),
            Term::Letrec(env, body) => {
                for it in env {
                    if let Item::Bind(_, e) = it {
                        e.walk(f);
                    }
                }
                body.walk(f)
            }
        }
    }

    pub fn check_arities(&self, sig: &mut HashMap<Fun, usize>) -> Result<(), TierError> {
        let mut err = None;
        self.walk(&mut |t| {
            if let Term::App(f, args) = t {
                let n = *sig.entry(*f).or_insert(args.len());
                if n != args.len() && err.is_none() {
                    err = Some(TierError::Arity(*f, n, args.len()));
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    fn w_atom(w: &W) -> Result<Atom, TierError> {
        match w.v {
            V::Var(a) => Err(TierError::AtomVar(a)),
            V::Atom(a) => Ok(w.perm.eval().ok_or_else(|| first_avar(&w.perm))?.apply(a)),
        }
    }

    fn sperm(p: &SPerm) -> Result<Perm, TierError> {
        p.eval().ok_or_else(|| first_avar(p))
    }

    /// Restriction to expressions with ground permutations and no
    /// environment variables.
    pub fn to_expr(&self) -> Result<Expr, TierError> {
        Ok(match self {
            Term::Atom(w) => Expr::Atom(Term::w_atom(w)?),
            Term::Susp(p, x) => Expr::Susp(Term::sperm(p)?, *x),
            Term::Lam(w, e) => Expr::Lam(Term::w_atom(w)?, Box::new(e.to_expr()?)),
            Term::App(f, args) => Expr::App(*f, args.iter().map(Term::to_expr).collect::<Result<_, _>>()?),
            Term::Letrec(env, body) => {
                let mut out = Vec::new();
                for it in env {
                    match it {
                        Item::Bind(w, e) => {
                            let a = Term::w_atom(w)?;
                            if out.iter().any(|(b, _)| *b == a) {
                                return Err(TierError::DuplicateBinder(a));
                            }
                            out.push((a, e.to_expr()?));
                        }
                        Item::Env(e) => return Err(TierError::EnvVar(*e)),
                    }
                }
                Expr::Letrec(out, Box::new(body.to_expr()?))
            }
        })
    }

    pub fn to_ground(&self) -> Result<Expr, TierError> {
        let e = self.to_expr()?;
        match e.vars().into_iter().next() {
            Some(x) => Err(TierError::ExprVar(x)),
            None => Ok(e),
        }
    }

    /// Restriction to matching patterns: ground permutations, environment
    /// variables allowed.
    pub fn to_pat(&self) -> Result<Pat, TierError> {
        Ok(match self {
            Term::Atom(w) => Pat::Atom(Term::w_atom(w)?),
            Term::Susp(p, x) => Pat::Susp(Term::sperm(p)?, *x),
            Term::Lam(w, e) => Pat::Lam(Term::w_atom(w)?, Box::new(e.to_pat()?)),
            Term::App(f, args) => Pat::App(*f, args.iter().map(Term::to_pat).collect::<Result<_, _>>()?),
            Term::Letrec(env, body) => {
                let mut out: Vec<PBind> = Vec::new();
                for it in env {
                    match it {
                        Item::Bind(w, e) => {
                            let a = Term::w_atom(w)?;
                            if out.iter().any(|b| matches!(b, PBind::Bind(c, _) if *c == a)) {
                                return Err(TierError::DuplicateBinder(a));
                            }
                            out.push(PBind::Bind(a, e.to_pat()?));
                        }
                        Item::Env(e) => out.push(PBind::Env(*e)),
                    }
                }
                Pat::Letrec(out, Box::new(body.to_pat()?))
            }
        })
    }
}

fn first_avar(p: &SPerm) -> TierError {
    let mut atoms = BTreeSet::new();
    let mut avars = BTreeSet::new();
    p.collect(&mut atoms, &mut avars);
    TierError::AtomVar(*avars.iter().next().expect("unevaluable permutation has an atom variable"))
}

impl From<&Expr> for Term {
    fn from(e: &Expr) -> Term {
        match e {
            Expr::Atom(a) => Term::Atom(W::atom(*a)),
            Expr::Susp(p, x) => Term::Susp(SPerm::from_perm(p), *x),
            Expr::Lam(a, e) => Term::Lam(W::atom(*a), Box::new(Term::from(&**e))),
            Expr::App(f, args) => Term::App(*f, args.iter().map(Term::from).collect()),
            Expr::Letrec(env, body) => {
                Term::Letrec(env.iter().map(|(a, e)| Item::Bind(W::atom(*a), Term::from(e))).collect(), Box::new(Term::from(&**body)))
            }
        }
    }
}

impl From<&Pat> for Term {
    fn from(e: &Pat) -> Term {
        match e {
            Pat::Atom(a) => Term::Atom(W::atom(*a)),
            Pat::Susp(p, x) => Term::Susp(SPerm::from_perm(p), *x),
            Pat::Lam(a, e) => Term::Lam(W::atom(*a), Box::new(Term::from(&**e))),
            Pat::App(f, args) => Term::App(*f, args.iter().map(Term::from).collect()),
            Pat::Letrec(env, body) => Term::Letrec(
                env.iter()
                    .map(|b| match b {
                        PBind::Bind(a, e) => Item::Bind(W::atom(*a), Term::from(e)),
                        PBind::Env(e) => Item::Env(*e),
                    })
                    .collect(),
                Box::new(Term::from(&**body)),
            ),
        }
    }
}
