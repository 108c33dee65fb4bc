//! Freshness constraints `a # e` and their reduction to atomic form.

use crate::name::{Atom, Var};
use crate::term::Expr;
use std::collections::{BTreeMap, BTreeSet};

pub use crate::av::constraint::av_satisfiable;

/// An atomic freshness context: a set of `a # X`.
pub type Atomic = BTreeSet<(Atom, Var)>;

/// Reduces `a # e` into `out`. Returns `false` on `a # a`.
pub fn simplify_one(a: Atom, e: &Expr, out: &mut Atomic) -> bool {
    match e {
        Expr::Atom(b) => a != *b,
        Expr::Susp(p, x) => {
            out.insert((p.inverse().apply(a), *x));
            true
        }
        Expr::Lam(b, s) => a == *b || simplify_one(a, s, out),
        Expr::App(_, args) => args.iter().all(|s| simplify_one(a, s, out)),
        Expr::Letrec(env, body) => {
            env.iter().any(|(b, _)| *b == a) || (env.iter().all(|(_, s)| simplify_one(a, s, out)) && simplify_one(a, body, out))
        }
    }
}

/// Simplifies a freshness context. `None` stands for the unsatisfiable
/// context.
pub fn simplify<'a, I>(nabla: I) -> Option<Atomic>
where
    I: IntoIterator<Item = (Atom, &'a Expr)>,
{
    let mut out = Atomic::new();
    for (a, e) in nabla {
        if !simplify_one(a, e, &mut out) {
            return None;
        }
    }
    Some(out)
}

/// Does the ground substitution `rho` satisfy every constraint?
pub fn check_ground<'a, I>(nabla: I, rho: &BTreeMap<Var, Expr>) -> bool
where
    I: IntoIterator<Item = (Atom, &'a Expr)>,
{
    nabla.into_iter().all(|(a, e)| !e.subst_map(rho).is_free_in(a))
}

pub fn check_atomic(nabla: &Atomic, rho: &BTreeMap<Var, Expr>) -> bool {
    nabla.iter().all(|(a, x)| rho.get(x).is_none_or(|e| !e.is_free_in(*a)))
}
