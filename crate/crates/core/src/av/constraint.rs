//! Freshness constraints with atom variables: `W # e` and `W1 =# W2`.

use super::expr::AExpr;
use super::grammar::{Assign, Grammar, GW};
use crate::name::{Atom, AtomSupply, AtomVar};
use crate::syntax::{Term, W};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AFresh {
    /// `W # e`
    Fresh(GW, AExpr),
    /// `W1 =# W2`, i.e. `W1 # λW2.W1`
    Same(GW, GW),
}

/// Simplifies one constraint into `out`, keeping parts that depend on
/// unassigned atom variables. Returns `false` on a refuted constraint.
pub fn simplify_av(c: &AFresh, g: &Grammar, assign: &Assign, out: &mut Vec<AFresh>) -> bool {
    match c {
        AFresh::Same(a, b) => match (g.eval_w(a, assign), g.eval_w(b, assign)) {
            (Some(x), Some(y)) => x == y,
            _ => {
                push(out, c.clone());
                true
            }
        },
        AFresh::Fresh(w, e) => {
            let Some(a) = g.eval_w(w, assign) else {
                return match e {
                    AExpr::App(_, args) => args.iter().all(|s| simplify_av(&AFresh::Fresh(*w, s.clone()), g, assign, out)),
                    _ => {
                        push(out, c.clone());
                        true
                    }
                };
            };
            fresh_atom(a, *w, e, g, assign, out)
        }
    }
}

fn fresh_atom(a: Atom, w: GW, e: &AExpr, g: &Grammar, assign: &Assign, out: &mut Vec<AFresh>) -> bool {
    let keep = |out: &mut Vec<AFresh>| {
        push(out, AFresh::Fresh(w, e.clone()));
        true
    };
    match e {
        AExpr::Name(v) => match g.eval_w(v, assign) {
            Some(b) => a != b,
            None => keep(out),
        },
        AExpr::Susp(..) => keep(out),
        AExpr::App(_, args) => args.iter().all(|s| fresh_atom(a, w, s, g, assign, out)),
        AExpr::Lam(v, b) => match g.eval_w(v, assign) {
            Some(x) if x == a => true,
            Some(_) => fresh_atom(a, w, b, g, assign, out),
            None => keep(out),
        },
        AExpr::Letrec(env, b) => {
            let binders: Option<Vec<Atom>> = env.iter().map(|(v, _)| g.eval_w(v, assign)).collect();
            match binders {
                Some(bs) if bs.contains(&a) => true,
                Some(_) => env.iter().all(|(_, s)| fresh_atom(a, w, s, g, assign, out)) && fresh_atom(a, w, b, g, assign, out),
                None => keep(out),
            }
        }
    }
}

fn push(out: &mut Vec<AFresh>, c: AFresh) {
    if !out.contains(&c) {
        out.push(c);
    }
}

/// Re-simplifies a whole context. `None` is the refuted context.
pub fn simplify_all(cs: &[AFresh], g: &Grammar, assign: &Assign) -> Option<Vec<AFresh>> {
    let mut out = Vec::new();
    for c in cs {
        if !simplify_av(c, g, assign, &mut out) {
            return None;
        }
    }
    Some(out)
}

fn names(cs: &[AFresh], g: &Grammar) -> (BTreeSet<Atom>, BTreeSet<AtomVar>) {
    let mut atoms = BTreeSet::new();
    let mut avars = BTreeSet::new();
    for c in cs {
        match c {
            AFresh::Fresh(w, e) => {
                AExpr::Name(*w).collect_names(g, &mut atoms, &mut avars);
                e.collect_names(g, &mut atoms, &mut avars);
            }
            AFresh::Same(a, b) => {
                AExpr::Name(*a).collect_names(g, &mut atoms, &mut avars);
                AExpr::Name(*b).collect_names(g, &mut atoms, &mut avars);
            }
        }
    }
    (atoms, avars)
}

/// Decides a context by guessing images of the unassigned atom variables
/// among the atoms present plus one fresh atom per variable. Returns the
/// full assignment of a satisfying guess.
pub fn av_satisfiable(cs: &[AFresh], g: &Grammar, assign: &Assign) -> Option<Assign> {
    let (mut atoms, avars) = names(cs, g);
    atoms.extend(assign.values().copied());
    let open: Vec<AtomVar> = avars.into_iter().filter(|a| !assign.contains_key(a)).collect();
    let mut supply = AtomSupply::avoiding(&atoms);
    let mut pool: Vec<Atom> = atoms.into_iter().collect();
    for _ in &open {
        pool.push(supply.fresh());
    }
    let mut idx = vec![0usize; open.len()];
    loop {
        let mut m = assign.clone();
        for (a, i) in open.iter().zip(&idx) {
            m.insert(*a, pool[*i]);
        }
        if simplify_all(cs, g, &m).is_some() {
            return Some(m);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A constraint in surface syntax, for printing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Shown {
    Fresh(W, Term),
    Same(W, W),
}

impl AFresh {
    pub fn show(&self, g: &Grammar, assign: &Assign) -> Shown {
        match self {
            AFresh::Fresh(w, e) => Shown::Fresh(g.show_w(w, assign), e.to_term(g, assign)),
            AFresh::Same(a, b) => Shown::Same(g.show_w(a, assign), g.show_w(b, assign)),
        }
    }
}

impl fmt::Display for Shown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shown::Fresh(w, e) => write!(f, "({w} {e})"),
            Shown::Same(a, b) => write!(f, "(= {a} {b})"),
        }
    }
}
