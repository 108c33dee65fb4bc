//! Brute-force reference implementations for cross-checking on small
//! inputs. Nothing here is optimised or shares code with the solvers beyond
//! the syntax types.

use crate::graph::Graph;
use crate::name::{Atom, Fun, Var};
use crate::term::Expr;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the oracle ({0} > {1})")]
    TooLarge(usize, usize),
}

pub fn free_atoms_naive(e: &Expr) -> BTreeSet<Atom> {
    match e {
        Expr::Atom(a) => [*a].into_iter().collect(),
        Expr::Susp(..) => BTreeSet::new(),
        Expr::Lam(a, b) => {
            let mut s = free_atoms_naive(b);
            s.remove(a);
            s
        }
        Expr::App(_, args) => args.iter().flat_map(free_atoms_naive).collect(),
        Expr::Letrec(env, b) => {
            let mut s: BTreeSet<Atom> = env.iter().flat_map(|(_, t)| free_atoms_naive(t)).collect();
            s.extend(free_atoms_naive(b));
            for (a, _) in env {
                s.remove(a);
            }
            s
        }
    }
}

/// Renames every atom occurrence, binders included, through `m`.
pub fn rename_all(e: &Expr, m: &BTreeMap<Atom, Atom>) -> Expr {
    let r = |a: &Atom| *m.get(a).unwrap_or(a);
    match e {
        Expr::Atom(a) => Expr::Atom(r(a)),
        Expr::Susp(..) => e.clone(),
        Expr::Lam(a, b) => Expr::Lam(r(a), Box::new(rename_all(b, m))),
        Expr::App(f, args) => Expr::App(*f, args.iter().map(|x| rename_all(x, m)).collect()),
        Expr::Letrec(env, b) => Expr::Letrec(env.iter().map(|(a, t)| (r(a), rename_all(t, m))).collect(), Box::new(rename_all(b, m))),
    }
}

fn swap_map(a: Atom, b: Atom) -> BTreeMap<Atom, Atom> {
    [(a, b), (b, a)].into_iter().collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Alpha-equivalence of ground expressions by the inductive definition,
/// trying every binding correspondence and every completion of the
/// renaming.
pub fn alpha_eq_naive(e1: &Expr, e2: &Expr) -> bool {
    match (e1, e2) {
        (Expr::Atom(a), Expr::Atom(b)) => a == b,
        (Expr::App(f, xs), Expr::App(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_naive(x, y)),
        (Expr::Lam(a, s), Expr::Lam(b, t)) if a == b => alpha_eq_naive(s, t),
        (Expr::Lam(a, s), Expr::Lam(b, t)) => !free_atoms_naive(e2).contains(a) && alpha_eq_naive(s, &rename_all(t, &swap_map(*a, *b))),
        (Expr::Letrec(env1, r1), Expr::Letrec(env2, r2)) if env1.len() == env2.len() => {
            let a: Vec<Atom> = env1.iter().map(|(x, _)| *x).collect();
            let b: Vec<Atom> = env2.iter().map(|(x, _)| *x).collect();
            let fa = free_atoms_naive(e2);
            if a.iter().any(|x| fa.contains(x)) {
                return false;
            }
            let aset: BTreeSet<Atom> = a.iter().copied().collect();
            let bset: BTreeSet<Atom> = b.iter().copied().collect();
            let left: Vec<Atom> = aset.difference(&bset).copied().collect();
            let right: Vec<Atom> = bset.difference(&aset).copied().collect();
            for rho in permutations(a.len()) {
                for ext in permutations(left.len()) {
                    let mut m: BTreeMap<Atom, Atom> = BTreeMap::new();
                    for (i, &j) in rho.iter().enumerate() {
                        m.insert(b[j], a[i]);
                    }
                    for (i, &j) in ext.iter().enumerate() {
                        m.insert(left[i], right[j]);
                    }
                    let ok = rho.iter().enumerate().all(|(i, &j)| alpha_eq_naive(&env1[i].1, &rename_all(&env2[j].1, &m)))
                        && alpha_eq_naive(r1, &rename_all(r2, &m));
                    if ok {
                        return true;
                    }
                }
            }
            false
        }
        _ => false,
    }
}

/// Every ground expression of depth at most `depth` (a leaf has depth 1)
/// built from atoms of `pool`, the function symbols of `sig`, lambdas
/// binding pool atoms and, when `letrec` is set, single-binding letrecs.
pub fn ground_exprs(pool: &[Atom], sig: &[(Fun, usize)], depth: usize, letrec: bool) -> Vec<Expr> {
    let mut levels: Vec<Vec<Expr>> = Vec::new();
    let mut leaves: Vec<Expr> = pool.iter().map(|a| Expr::Atom(*a)).collect();
    leaves.extend(sig.iter().filter(|(_, n)| *n == 0).map(|(f, _)| Expr::App(*f, Vec::new())));
    levels.push(leaves);
    for d in 1..depth {
        let below: Vec<Expr> = levels.iter().flatten().cloned().collect();
        let prev = &levels[d - 1];
        let mut next = Vec::new();
        // children drawn from `below`, at least one from the previous level
        let tuples = |n: usize| {
            let mut tuples: Vec<(Vec<Expr>, bool)> = vec![(Vec::new(), false)];
            for _ in 0..n {
                let mut nt = Vec::new();
                for (t, deep) in &tuples {
                    for x in &below {
                        let mut t2 = t.clone();
                        t2.push(x.clone());
                        nt.push((t2, *deep || prev.contains(x)));
                    }
                }
                tuples = nt;
            }
            tuples.into_iter().filter(|(_, deep)| *deep).map(|(t, _)| t).collect::<Vec<_>>()
        };
        for &(f, n) in sig.iter().filter(|(_, n)| *n > 0) {
            next.extend(tuples(n).into_iter().map(|t| Expr::App(f, t)));
        }
        for a in pool {
            for x in prev {
                next.push(Expr::Lam(*a, Box::new(x.clone())));
            }
        }
        if letrec {
            for a in pool {
                for t in tuples(2) {
                    let [s, r]: [Expr; 2] = t.try_into().unwrap();
                    next.push(Expr::Letrec(vec![(*a, s)], Box::new(r)));
                }
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

/// Applies a ground substitution, pushing suspension permutations into the
/// image.
pub fn ground_subst(e: &Expr, rho: &BTreeMap<Var, Expr>) -> Option<Expr> {
    Some(match e {
        Expr::Atom(_) => e.clone(),
        Expr::Susp(p, x) => {
            let m: BTreeMap<Atom, Atom> = p.pairs().iter().copied().collect();
            rename_all(rho.get(x)?, &m)
        }
        Expr::Lam(a, b) => Expr::Lam(*a, Box::new(ground_subst(b, rho)?)),
        Expr::App(f, args) => Expr::App(*f, args.iter().map(|x| ground_subst(x, rho)).collect::<Option<_>>()?),
        Expr::Letrec(env, b) => Expr::Letrec(
            env.iter().map(|(a, t)| Some((*a, ground_subst(t, rho)?))).collect::<Option<_>>()?,
            Box::new(ground_subst(b, rho)?),
        ),
    })
}

fn vars_of(e: &Expr, out: &mut BTreeSet<Var>) {
    match e {
        Expr::Atom(_) => {}
        Expr::Susp(_, x) => {
            out.insert(*x);
        }
        Expr::Lam(_, b) => vars_of(b, out),
        Expr::App(_, args) => args.iter().for_each(|a| vars_of(a, out)),
        Expr::Letrec(env, b) => {
            env.iter().for_each(|(_, t)| vars_of(t, out));
            vars_of(b, out)
        }
    }
}

/// Like `ground_subst`, but leaves unassigned variables in place.
fn partial_subst(e: &Expr, rho: &BTreeMap<Var, Expr>) -> Expr {
    match e {
        Expr::Atom(_) => e.clone(),
        Expr::Susp(p, x) => match rho.get(x) {
            Some(v) => rename_all(v, &p.pairs().iter().copied().collect()),
            None => e.clone(),
        },
        Expr::Lam(a, b) => Expr::Lam(*a, Box::new(partial_subst(b, rho))),
        Expr::App(f, args) => Expr::App(*f, args.iter().map(|x| partial_subst(x, rho)).collect()),
        Expr::Letrec(env, b) => {
            Expr::Letrec(env.iter().map(|(a, t)| (*a, partial_subst(t, rho))).collect(), Box::new(partial_subst(b, rho)))
        }
    }
}

/// False only if no instantiation of the remaining variables can make the
/// two sides alpha-equivalent.
fn may_equal(s: &Expr, t: &Expr) -> bool {
    match (s, t) {
        (Expr::Susp(..), _) | (_, Expr::Susp(..)) => true,
        (Expr::Atom(a), Expr::Atom(b)) => a == b,
        (Expr::App(f, xs), Expr::App(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| may_equal(x, y)),
        (Expr::Lam(a, x), Expr::Lam(b, y)) => a != b || may_equal(x, y),
        (Expr::Letrec(e1, _), Expr::Letrec(e2, _)) => e1.len() == e2.len(),
        _ => false,
    }
}

/// Every ground substitution over `space` solving all equations and
/// freshness constraints. Partial assignments are abandoned as soon as an
/// equation is refuted outside the unassigned variables.
pub fn enum_ground_solutions(eqs: &[(Expr, Expr)], fresh: &[(Atom, Expr)], space: &[Expr]) -> Vec<BTreeMap<Var, Expr>> {
    let mut vars = BTreeSet::new();
    for (s, t) in eqs {
        vars_of(s, &mut vars);
        vars_of(t, &mut vars);
    }
    for (_, e) in fresh {
        vars_of(e, &mut vars);
    }
    let vars: Vec<Var> = vars.into_iter().collect();
    let mut out = Vec::new();
    let mut rho = BTreeMap::new();
    extend(eqs, fresh, space, &vars, &mut rho, &mut out);
    out
}

fn extend(
    eqs: &[(Expr, Expr)],
    fresh: &[(Atom, Expr)],
    space: &[Expr],
    vars: &[Var],
    rho: &mut BTreeMap<Var, Expr>,
    out: &mut Vec<BTreeMap<Var, Expr>>,
) {
    let Some((x, rest)) = vars.split_first() else {
        let ok = eqs.iter().all(|(s, t)| alpha_eq_naive(&ground_subst(s, rho).unwrap(), &ground_subst(t, rho).unwrap()))
            && fresh.iter().all(|(a, e)| !free_atoms_naive(&ground_subst(e, rho).unwrap()).contains(a));
        if ok {
            out.push(rho.clone());
        }
        return;
    };
    for v in space {
        rho.insert(*x, v.clone());
        if rest.is_empty() || eqs.iter().all(|(s, t)| may_equal(&partial_subst(s, rho), &partial_subst(t, rho))) {
            extend(eqs, fresh, space, rest, rho, out);
        }
    }
    rho.remove(x);
}

const GRAPH_LIMIT: usize = 12;

fn guard(n: usize) -> Result<(), OracleError> {
    if n > GRAPH_LIMIT {
        Err(OracleError::TooLarge(n, GRAPH_LIMIT))
    } else {
        Ok(())
    }
}

/// Exhaustive search for a Hamiltonian cycle.
pub fn ham_cycle(g: &Graph) -> Result<bool, OracleError> {
    guard(g.n())?;
    let n = g.n();
    if n < 3 {
        return Ok(false);
    }
    let adj = g.neighbours();
    fn go(path: &mut Vec<usize>, used: &mut [bool], adj: &[BTreeSet<usize>]) -> bool {
        let n = used.len();
        let last = *path.last().unwrap();
        if path.len() == n {
            return adj[last].contains(&path[0]);
        }
        for &v in &adj[last] {
            if !used[v] {
                used[v] = true;
                path.push(v);
                if go(path, used, adj) {
                    return true;
                }
                path.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    Ok(go(&mut vec![0], &mut used, &adj))
}

/// Exhaustive search for an isomorphism.
pub fn graph_iso(g1: &Graph, g2: &Graph) -> Result<bool, OracleError> {
    guard(g1.n().max(g2.n()))?;
    if g1.n() != g2.n() || g1.edges.len() != g2.edges.len() {
        return Ok(false);
    }
    let e2: BTreeSet<(usize, usize)> = g2.edges.iter().copied().collect();
    let n = g1.n();
    fn go(m: &mut Vec<usize>, used: &mut [bool], g1: &Graph, e2: &BTreeSet<(usize, usize)>) -> bool {
        let n = used.len();
        if m.len() == n {
            return g1.edges.iter().all(|&(u, v)| e2.contains(&(m[u].min(m[v]), m[u].max(m[v]))));
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                m.push(v);
                if go(m, used, g1, e2) {
                    return true;
                }
                m.pop();
                used[v] = false;
            }
        }
        false
    }
    Ok(go(&mut Vec::new(), &mut vec![false; n], g1, &e2))
}
