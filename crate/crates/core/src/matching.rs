//! One-sided matching with letrec, and problem generators that encode
//! graph questions as matching problems.

use crate::alpha::{match_all, BudgetExceeded, MatchOutcome, Mode};
use crate::graph::{Graph, GraphError};
use crate::name::{canonical_name, Atom, Var};
use crate::pattern::Pat;
use crate::term::Expr;

/// Matches every pattern against its ground target.
pub fn letrec_match(eqs: &[(Expr, Expr)], mode: Mode, budget: u64) -> Result<MatchOutcome, BudgetExceeded> {
    let eqs: Vec<(Pat, Expr)> = eqs.iter().map(|(p, t)| (Pat::from(p), t.clone())).collect();
    match_all(&eqs, mode, budget)
}

fn pool(prefix: &str, i: usize) -> Atom {
    Atom::new(&format!("{prefix}{}", canonical_name(i)))
}

fn node_env(g: &Graph) -> Vec<(Atom, Expr)> {
    (0..g.n()).map(|i| (pool("n", i), Expr::app("node", vec![Expr::Atom(pool("n", i))]))).collect()
}

fn edge_env(g: &Graph, f: &str, out: &mut Vec<(Atom, Expr)>) {
    for (i, &(u, v)) in g.edges.iter().enumerate() {
        let (a, b) = (Expr::Atom(pool("n", u)), Expr::Atom(pool("n", v)));
        out.push((pool("e", 2 * i), Expr::app(f, vec![a.clone(), b.clone()])));
        out.push((pool("e", 2 * i + 1), Expr::app(f, vec![b, a])));
    }
}

/// `(pattern, target)` such that the pattern matches iff the 3-regular
/// graph `g` has a Hamiltonian cycle.
pub fn encode_hamiltonian(g: &Graph) -> Result<(Expr, Expr), GraphError> {
    if g.regular_degree() != Some(3) {
        return Err(GraphError::NotRegular(3));
    }
    let n = g.n();
    let mut env = node_env(g);
    edge_env(g, "f", &mut env);
    let target = Expr::letrec(env, Expr::konst("0"));

    let x = |i: usize| Expr::var(Var::new(&format!("X{}", i % n + 1)));
    let mut penv: Vec<(Atom, Expr)> = (0..n).map(|i| (pool("n", i), Expr::app("node", vec![x(i)]))).collect();
    for i in 0..n {
        penv.push((pool("c", i), Expr::app("f", vec![x(i), x(i + 1)])));
    }
    for j in 0..3 * n - n {
        let z = Expr::var(Var::new(&format!("Z{}", j + 1)));
        let z2 = Expr::var(Var::new(&format!("Y{}", j + 1)));
        penv.push((pool("d", j), Expr::app("f", vec![z, z2])));
    }
    Ok((Expr::letrec(penv, Expr::konst("0")), target))
}

/// `(pattern, target)` with a single pattern variable such that the
/// pattern matches iff `g2` is isomorphic to `g1`.
pub fn encode_graph_iso(g1: &Graph, g2: &Graph) -> Result<(Expr, Expr), GraphError> {
    let d1 = g1.regular_degree().filter(|&d| d >= 1).ok_or(GraphError::Irregular)?;
    let d2 = g2.regular_degree().filter(|&d| d >= 1).ok_or(GraphError::Irregular)?;
    if g1.n() != g2.n() || g1.edges.len() != g2.edges.len() || d1 != d2 {
        return Err(GraphError::SizeMismatch);
    }
    let mut env = node_env(g1);
    edge_env(g1, "edge", &mut env);
    let refs = (0..2 * g1.edges.len()).map(|i| Expr::Atom(pool("e", i))).collect();
    let target = Expr::letrec(env, Expr::app("g", refs));

    let mut penv = node_env(g2);
    edge_env(g2, "edge", &mut penv);
    Ok((Expr::letrec(penv, Expr::var(Var::new("X"))), target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::{parse_expr, parse_ground};

    fn solvable(p: &Expr, t: &Expr) -> bool {
        !letrec_match(&[(p.clone(), t.clone())], Mode::Decision, 10_000_000).unwrap().solutions.is_empty()
    }

    #[test]
    fn lbeta_match() {
        let p = parse_expr("(app (lam c ?X1) ?X2)").unwrap();
        let t = parse_ground("(app (lam a a) (lam b b))").unwrap();
        let out = letrec_match(&[(p, t)], Mode::Collecting, 1000).unwrap();
        assert_eq!(out.solutions.len(), 1);
        let s = &out.solutions[0];
        assert_eq!(s.vars[&Var::new("X1")], parse_ground("c").unwrap());
        assert!(crate::alpha::alpha_eq(&s.vars[&Var::new("X2")], &parse_ground("(lam b b)").unwrap()));
    }

    #[test]
    fn binder_fresh_failure() {
        let p = parse_expr("(lam c c)").unwrap();
        let t = parse_ground("(lam b a)").unwrap();
        assert!(!solvable(&p, &t));
    }

    #[test]
    fn small_cubic_graphs() {
        for (name, ham) in [("k4", true), ("k33", true), ("prism", true)] {
            let (p, t) = encode_hamiltonian(&Graph::named(name).unwrap()).unwrap();
            assert_eq!(solvable(&p, &t), ham, "{name}");
        }
        assert!(encode_hamiltonian(&Graph::named("c5").unwrap()).is_err());
    }

    #[test]
    fn cube_and_petersen() {
        let (p, t) = encode_hamiltonian(&Graph::named("cube").unwrap()).unwrap();
        assert!(solvable(&p, &t));
        let (p, t) = encode_hamiltonian(&Graph::named("petersen").unwrap()).unwrap();
        assert!(!solvable(&p, &t));
    }

    #[test]
    fn iso_target_is_garbage_free() {
        let c6 = Graph::named("c6").unwrap();
        let (p, t) = encode_graph_iso(&c6, &c6.relabel(&[3, 1, 4, 0, 5, 2])).unwrap();
        assert!(t.is_garbage_free());
        assert!(solvable(&p, &t));
        let (p, t) = encode_graph_iso(&c6, &Graph::named("2c3").unwrap()).unwrap();
        assert!(!solvable(&p, &t));
    }
}
