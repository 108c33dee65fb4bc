//! Left-hand sides of matching problems.

use crate::name::{Atom, EnvVar, Fun, Var};
use crate::perm::Perm;
use crate::term::Expr;
use std::collections::{BTreeMap, BTreeSet};

/// Like [`Expr`], but letrec environments may contain environment variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Pat {
    Atom(Atom),
    Susp(Perm, Var),
    Lam(Atom, Box<Pat>),
    App(Fun, Vec<Pat>),
    Letrec(Vec<PBind>, Box<Pat>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum PBind {
    Bind(Atom, Pat),
    Env(EnvVar),
}

/// A ground instance for every variable of a pattern.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Subst {
    pub vars: BTreeMap<Var, Expr>,
    pub envs: BTreeMap<EnvVar, Vec<(Atom, Expr)>>,
}

impl From<&Expr> for Pat {
    fn from(e: &Expr) -> Pat {
        match e {
            Expr::Atom(a) => Pat::Atom(*a),
            Expr::Susp(p, x) => Pat::Susp(p.clone(), *x),
            Expr::Lam(a, e) => Pat::Lam(*a, Box::new(Pat::from(&**e))),
            Expr::App(f, args) => Pat::App(*f, args.iter().map(Pat::from).collect()),
            Expr::Letrec(env, body) => {
                Pat::Letrec(env.iter().map(|(a, e)| PBind::Bind(*a, Pat::from(e))).collect(), Box::new(Pat::from(&**body)))
            }
        }
    }
}

impl Pat {
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk(&mut |p| {
            if let Pat::Susp(_, x) = p {
                out.insert(*x);
            }
        });
        out
    }

    pub fn env_vars(&self) -> BTreeSet<EnvVar> {
        let mut out = BTreeSet::new();
        self.walk(&mut |p| {
            if let Pat::Letrec(env, _) = p {
                for b in env {
                    if let PBind::Env(e) = b {
                        out.insert(*e);
                    }
                }
            }
        });
        out
    }

    /// Every atom occurring literally, including binders and permutations.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.walk(&mut |p| match p {
            Pat::Atom(a) | Pat::Lam(a, _) => {
                out.insert(*a);
            }
            Pat::Susp(q, _) => out.extend(q.domain_iter()),
            Pat::Letrec(env, _) => {
                for b in env {
                    if let PBind::Bind(a, _) = b {
                        out.insert(*a);
                    }
                }
            }
            Pat::App(..) => {}
        });
        out
    }

    pub fn walk(&self, f: &mut dyn FnMut(&Pat)) {
        f(self);
        match self {
            Pat::Atom(_) | Pat::Susp(..) => {}
            Pat::Lam(_, e) => e.walk(f),
            Pat::App(_, args) => args.iter().for_each(|e| e.walk(f)),
            Pat::Letrec(env, body) => {
                for b in env {
                    if let PBind::Bind(_, e) = b {
                        e.walk(f);
                    }
                }
                body.walk(f)
            }
        }
    }

    /// Applies a substitution. Variables without an image stay in place.
    pub fn apply(&self, s: &Subst) -> Pat {
        match self {
            Pat::Atom(_) => self.clone(),
            Pat::Susp(p, x) => match s.vars.get(x) {
                Some(e) => Pat::from(&e.permute(p)),
                None => self.clone(),
            },
            Pat::Lam(a, e) => Pat::Lam(*a, Box::new(e.apply(s))),
            Pat::App(f, args) => Pat::App(*f, args.iter().map(|e| e.apply(s)).collect()),
            Pat::Letrec(env, body) => {
                let mut out = Vec::new();
                for b in env {
                    match b {
                        PBind::Bind(a, e) => out.push(PBind::Bind(*a, e.apply(s))),
                        PBind::Env(e) => match s.envs.get(e) {
                            Some(bs) => out.extend(bs.iter().map(|(a, r)| PBind::Bind(*a, Pat::from(r)))),
                            None => out.push(PBind::Env(*e)),
                        },
                    }
                }
                Pat::Letrec(out, Box::new(body.apply(s)))
            }
        }
    }

    /// Back to an expression, if no environment variable is left.
    pub fn to_expr(&self) -> Option<Expr> {
        Some(match self {
            Pat::Atom(a) => Expr::Atom(*a),
            Pat::Susp(p, x) => Expr::Susp(p.clone(), *x),
            Pat::Lam(a, e) => Expr::Lam(*a, Box::new(e.to_expr()?)),
            Pat::App(f, args) => Expr::App(*f, args.iter().map(Pat::to_expr).collect::<Option<_>>()?),
            Pat::Letrec(env, body) => Expr::Letrec(
                env.iter()
                    .map(|b| match b {
                        PBind::Bind(a, e) => Some((*a, e.to_expr()?)),
                        PBind::Env(_) => None,
                    })
                    .collect::<Option<_>>()?,
                Box::new(body.to_expr()?),
            ),
        })
    }

    /// `self` with `s` applied, as a ground expression.
    pub fn instantiate(&self, s: &Subst) -> Option<Expr> {
        let e = self.apply(s).to_expr()?;
        e.is_ground().then_some(e)
    }
}
