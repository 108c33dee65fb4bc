//! Expressions with atom variables, permutations held in a grammar.

use super::grammar::{Assign, Grammar, Nt, GW};
use crate::name::{Atom, AtomVar, Fun, Var};
use crate::syntax::{Item, Term, TierError, V};
use crate::term::{Expr, Top};
use std::collections::BTreeSet;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AExpr {
    Name(GW),
    Susp(Nt, Var),
    Lam(GW, Box<AExpr>),
    App(Fun, Vec<AExpr>),
    Letrec(Vec<(GW, AExpr)>, Box<AExpr>),
}

impl AExpr {
    pub fn var(x: Var) -> AExpr {
        AExpr::Susp(0, x)
    }

    pub fn from_term(t: &Term, g: &mut Grammar) -> Result<AExpr, TierError> {
        Ok(match t {
            Term::Atom(w) => AExpr::Name(g.from_w(w)),
            Term::Susp(p, x) => AExpr::Susp(g.from_sperm(p), *x),
            Term::Lam(w, b) => AExpr::Lam(g.from_w(w), Box::new(AExpr::from_term(b, g)?)),
            Term::App(f, args) => AExpr::App(*f, args.iter().map(|a| AExpr::from_term(a, g)).collect::<Result<_, _>>()?),
            Term::Letrec(items, b) => {
                let mut env = Vec::new();
                for it in items {
                    match it {
                        Item::Bind(w, s) => env.push((g.from_w(w), AExpr::from_term(s, g)?)),
                        Item::Env(e) => return Err(TierError::EnvVar(*e)),
                    }
                }
                AExpr::Letrec(env, Box::new(AExpr::from_term(b, g)?))
            }
        })
    }

    pub fn to_term(&self, g: &Grammar, assign: &Assign) -> Term {
        match self {
            AExpr::Name(w) => Term::Atom(g.show_w(w, assign)),
            AExpr::Susp(p, x) => Term::Susp(g.show(*p, assign), *x),
            AExpr::Lam(w, b) => Term::Lam(g.show_w(w, assign), Box::new(b.to_term(g, assign))),
            AExpr::App(f, args) => Term::App(*f, args.iter().map(|a| a.to_term(g, assign)).collect()),
            AExpr::Letrec(env, b) => Term::Letrec(
                env.iter().map(|(w, s)| Item::Bind(g.show_w(w, assign), s.to_term(g, assign))).collect(),
                Box::new(b.to_term(g, assign)),
            ),
        }
    }

    /// The expression without atom variables, if every name is determined.
    pub fn to_expr(&self, g: &Grammar, assign: &Assign) -> Option<Expr> {
        Some(match self {
            AExpr::Name(w) => Expr::Atom(g.eval_w(w, assign)?),
            AExpr::Susp(p, x) => Expr::Susp(g.eval(*p, assign)?, *x),
            AExpr::Lam(w, b) => Expr::Lam(g.eval_w(w, assign)?, Box::new(b.to_expr(g, assign)?)),
            AExpr::App(f, args) => Expr::App(*f, args.iter().map(|a| a.to_expr(g, assign)).collect::<Option<_>>()?),
            AExpr::Letrec(env, b) => Expr::Letrec(
                env.iter().map(|(w, s)| Some((g.eval_w(w, assign)?, s.to_expr(g, assign)?))).collect::<Option<_>>()?,
                Box::new(b.to_expr(g, assign)?),
            ),
        })
    }

    pub fn permute(&self, p: Nt, g: &mut Grammar) -> AExpr {
        if p == 0 {
            return self.clone();
        }
        match self {
            AExpr::Name(w) => AExpr::Name(g.permute_w(p, *w)),
            AExpr::Susp(q, x) => AExpr::Susp(g.compose(p, *q), *x),
            AExpr::Lam(w, b) => AExpr::Lam(g.permute_w(p, *w), Box::new(b.permute(p, g))),
            AExpr::App(f, args) => AExpr::App(*f, args.iter().map(|a| a.permute(p, g)).collect()),
            AExpr::Letrec(env, b) => {
                AExpr::Letrec(env.iter().map(|(w, s)| (g.permute_w(p, *w), s.permute(p, g))).collect(), Box::new(b.permute(p, g)))
            }
        }
    }

    /// Replaces `X` by `by`.
    pub fn subst(&self, x: Var, by: &AExpr, g: &mut Grammar) -> AExpr {
        match self {
            AExpr::Susp(p, y) if *y == x => by.permute(*p, g),
            AExpr::Name(_) | AExpr::Susp(..) => self.clone(),
            AExpr::Lam(w, b) => AExpr::Lam(*w, Box::new(b.subst(x, by, g))),
            AExpr::App(f, args) => AExpr::App(*f, args.iter().map(|a| a.subst(x, by, g)).collect()),
            AExpr::Letrec(env, b) => AExpr::Letrec(env.iter().map(|(w, s)| (*w, s.subst(x, by, g))).collect(), Box::new(b.subst(x, by, g))),
        }
    }

    pub fn is_susp(&self) -> bool {
        matches!(self, AExpr::Susp(..))
    }

    pub fn top(&self) -> Option<Top> {
        match self {
            AExpr::Name(_) => Some(Top::Atom),
            AExpr::Susp(..) => None,
            AExpr::Lam(..) => Some(Top::Lam),
            AExpr::App(f, args) => Some(Top::App(*f, args.len())),
            AExpr::Letrec(env, _) => Some(Top::Letrec(env.len())),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            AExpr::Name(_) => {}
            AExpr::Susp(_, x) => {
                out.insert(*x);
            }
            AExpr::Lam(_, b) => b.collect_vars(out),
            AExpr::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            AExpr::Letrec(env, b) => {
                env.iter().for_each(|(_, s)| s.collect_vars(out));
                b.collect_vars(out)
            }
        }
    }

    pub fn has_var(&self, x: Var) -> bool {
        match self {
            AExpr::Name(_) => false,
            AExpr::Susp(_, y) => *y == x,
            AExpr::Lam(_, b) => b.has_var(x),
            AExpr::App(_, args) => args.iter().any(|a| a.has_var(x)),
            AExpr::Letrec(env, b) => env.iter().any(|(_, s)| s.has_var(x)) || b.has_var(x),
        }
    }

    fn walk_ws(&self, f: &mut dyn FnMut(&GW), p: &mut dyn FnMut(Nt)) {
        match self {
            AExpr::Name(w) => f(w),
            AExpr::Susp(q, _) => p(*q),
            AExpr::Lam(w, b) => {
                f(w);
                b.walk_ws(f, p)
            }
            AExpr::App(_, args) => args.iter().for_each(|a| a.walk_ws(f, p)),
            AExpr::Letrec(env, b) => {
                for (w, s) in env {
                    f(w);
                    s.walk_ws(f, p);
                }
                b.walk_ws(f, p)
            }
        }
    }

    pub fn collect_names(&self, g: &Grammar, atoms: &mut BTreeSet<Atom>, avars: &mut BTreeSet<AtomVar>) {
        let mut ws = Vec::new();
        let mut nts = Vec::new();
        self.walk_ws(&mut |w| ws.push(*w), &mut |p| nts.push(p));
        for w in ws {
            match w.v {
                V::Atom(a) => atoms.insert(a),
                V::Var(a) => avars.insert(a),
            };
            nts.push(w.p);
        }
        for p in nts {
            g.collect_atoms(p, atoms);
            avars.extend(g.avars(p).iter().copied());
        }
    }

    /// Nodes, not counting permutations.
    pub fn size(&self) -> usize {
        match self {
            AExpr::Name(_) | AExpr::Susp(..) => 1,
            AExpr::Lam(_, b) => 2 + b.size(),
            AExpr::App(_, args) => 1 + args.iter().map(AExpr::size).sum::<usize>(),
            AExpr::Letrec(env, b) => 1 + env.iter().map(|(_, s)| 1 + s.size()).sum::<usize>() + b.size(),
        }
    }

    /// Every letrec subexpression, outermost first.
    pub fn letrecs<'a>(&'a self, out: &mut Vec<&'a [(GW, AExpr)]>) {
        match self {
            AExpr::Name(_) | AExpr::Susp(..) => {}
            AExpr::Lam(_, b) => b.letrecs(out),
            AExpr::App(_, args) => args.iter().for_each(|a| a.letrecs(out)),
            AExpr::Letrec(env, b) => {
                out.push(env);
                env.iter().for_each(|(_, s)| s.letrecs(out));
                b.letrecs(out)
            }
        }
    }
}
