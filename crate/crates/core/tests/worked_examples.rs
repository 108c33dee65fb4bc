//! Small hand-checked cases for each part of the library.

use nomlet::alpha::{alpha_eq, Mode};
use nomlet::av::{av_satisfiable, letrec_unify_av, AExpr, AFresh, Assign, AvConfig, Grammar, GW};
use nomlet::envmatch::env_match;
use nomlet::freshness::{check_atomic, simplify, Atomic};
use nomlet::graph::Graph;
use nomlet::matching::{encode_graph_iso, encode_hamiltonian, letrec_match};
use nomlet::name::{fresh_atom, Atom, AtomVar, EnvVar, Var, VarSupply};
use nomlet::oracle;
use nomlet::perm::Perm;
use nomlet::permgroup::{member, reduce};
use nomlet::sexp::{parse_expr, parse_ground, parse_problem, parse_term};
use nomlet::syntax::V;
use nomlet::term::{garbage_split, Expr};
use nomlet::unify::{flatten, letrec_unify, Config};
use std::collections::BTreeSet;

fn at(s: &str) -> Atom {
    Atom::new(s)
}

fn g(s: &str) -> Expr {
    parse_ground(s).unwrap()
}

fn e(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

fn swap(a: &str, b: &str) -> Perm {
    Perm::swap(at(a), at(b))
}

fn set(names: &[&str]) -> BTreeSet<Atom> {
    names.iter().map(|s| at(s)).collect()
}

fn collect() -> Config {
    Config { mode: Mode::Collecting, ..Config::default() }
}

#[test]
fn permutation_action_ignores_binding() {
    assert_eq!(g("(lam x (lam x a))").permute(&swap("x", "y")), g("(lam y (lam y a))"));
    let t = g("(letrec ((c a) (d b)) True)");
    assert_eq!(t.permute(&Perm::id()), t);
    assert_eq!(t.permute(&swap("a", "b")), g("(letrec ((c b) (d a)) True)"));
}

#[test]
fn free_atoms() {
    assert_eq!(g("(letrec ((c a) (d b)) True)").free_atoms(), set(&["a", "b"]));
    assert!(g("(lam a a)").free_atoms().is_empty());
    assert_eq!(g("(letrec ((a b) (b c)) b)").free_atoms(), set(&["c"]));
    assert_eq!(oracle::free_atoms_naive(&g("(letrec ((a b) (b c)) b)")), set(&["c"]));
}

#[test]
fn alpha_equivalence() {
    assert!(alpha_eq(&g("(letrec ((a f) (b g)) (h a b))"), &g("(letrec ((b g) (a f)) (h a b))")));
    let t = g("(letrec ((c a) (d b)) True)");
    assert!(alpha_eq(&t, &t));
    assert!(alpha_eq(&t.permute(&swap("a", "b")), &t));
    assert!(!alpha_eq(&g("(lam a a)"), &g("(lam a b)")));
}

#[test]
fn garbage() {
    let Expr::Letrec(env, body) = g("(letrec ((a b) (b c)) b)") else { panic!() };
    let (garbage, _) = garbage_split(&env, &body);
    assert_eq!(garbage, vec![(at("a"), g("b"))]);
    let Expr::Letrec(env, body) = g("(letrec ((a d) (b 1) (c d)) (f b))") else { panic!() };
    let (garbage, _) = garbage_split(&env, &body);
    assert_eq!(garbage.iter().map(|(a, _)| *a).collect::<BTreeSet<_>>(), set(&["a", "c"]));
    assert!(g("(lam a a)").is_garbage_free());
}

#[test]
fn fresh_atoms() {
    assert_eq!(fresh_atom(set(&["a", "b"]).iter()), at("c"));
    assert_eq!(fresh_atom(BTreeSet::new().iter()), at("a"));
    let all: BTreeSet<Atom> = (b'a'..=b'z').map(|c| at(&(c as char).to_string())).collect();
    assert!(!all.contains(&fresh_atom(all.iter())));
}

#[test]
fn permutations() {
    assert!(swap("a", "b").compose(&swap("a", "b")).is_id());
    let p = swap("a", "b").compose(&swap("b", "c"));
    assert!(p.compose(&p.inverse()).is_id());
    assert_eq!(swap("a", "b").domain(), set(&["a", "b"]));
}

#[test]
fn group_membership() {
    assert!(member(&Perm::id(), &[swap("a", "b")]));
    assert!(member(&swap("a", "c"), &[swap("a", "b"), swap("b", "c")]));
    let ab_cd = swap("a", "b").compose(&swap("c", "d"));
    assert!(!member(&swap("a", "b"), &[ab_cd]));
    assert_eq!(reduce(&[swap("a", "b"), swap("a", "b")]), vec![swap("a", "b")]);
    assert_eq!(reduce(&[swap("a", "b"), swap("b", "c"), swap("a", "c")]).len(), 2);
    assert!(reduce(&[Perm::id()]).is_empty());
}

fn simp(a: &str, s: &str) -> Option<Atomic> {
    simplify([(at(a), &e(s))])
}

#[test]
fn freshness() {
    assert_eq!(simp("a", "b"), Some(Atomic::new()));
    assert_eq!(simp("a", "(lam a (f ?S))"), Some(Atomic::new()));
    assert_eq!(simp("a", "(perm ((a b)) ?X)"), Some([(at("b"), Var::new("X"))].into_iter().collect()));
    assert_eq!(simp("a", "a"), None);

    let cs: Atomic = [(at("a"), Var::new("X"))].into_iter().collect();
    let rho = |v: &str| [(Var::new("X"), g(v))].into_iter().collect();
    assert!(check_atomic(&cs, &rho("b")));
    assert!(!check_atomic(&cs, &rho("a")));
    assert!(check_atomic(&cs, &rho("(lam a a)")));
}

#[test]
fn atom_variable_constraints() {
    let gr = Grammar::new();
    let av = |s: &str| GW::plain(V::Var(AtomVar::new(s)));
    let c = AFresh::Fresh(av("A"), AExpr::Name(av("B")));
    let w = av_satisfiable(&[c], &gr, &Assign::new()).unwrap();
    assert_ne!(w[&AtomVar::new("A")], w[&AtomVar::new("B")]);
    let a = GW::plain(V::Atom(at("a")));
    let bad = [AFresh::Same(av("A"), a), AFresh::Fresh(av("A"), AExpr::Name(a))];
    assert!(av_satisfiable(&bad, &gr, &Assign::new()).is_none());
    assert!(av_satisfiable(&[], &gr, &Assign::new()).is_some());
}

#[test]
fn flattening() {
    let mut vs = VarSupply::avoiding([Var::new("X")].iter());
    let out = flatten(&[(g("(f (g a))"), e("?X"))], &mut vs);
    assert_eq!(out.len(), 2);
    let Expr::App(_, args) = &out[0].0 else { panic!() };
    let Expr::Susp(_, x1) = args[0] else { panic!() };
    assert_eq!(out[0].1, e("?X"));
    assert_eq!(out[1], (Expr::var(x1), g("(g a)")));

    let mut vs = VarSupply::avoiding([Var::new("X")].iter());
    assert_eq!(flatten(&[(g("a"), e("?X"))], &mut vs), vec![(g("a"), e("?X"))]);

    let mut vs = VarSupply::avoiding([Var::new("X")].iter());
    let out = flatten(&[(g("(lam a (g a))"), e("?X"))], &mut vs);
    assert_eq!(out.len(), 2);
    assert!(matches!(&out[0].0, Expr::Lam(a, b) if *a == at("a") && b.is_susp()));
    assert_eq!(out[1].1, g("(g a)"));
}

#[test]
fn unification() {
    let p = parse_problem(include_str!("../examples/rotation.prob")).unwrap();
    let eqs: Vec<_> = p.eqs.iter().map(|(s, t)| (s.to_expr().unwrap(), t.to_expr().unwrap())).collect();
    let out = letrec_unify(&eqs, &[], &Config::default()).unwrap();
    assert_eq!(out.unifiers.len(), 1);
    assert!(out.unifiers[0].fix.is_empty());

    let t = g("(f a (lam b b))");
    let out = letrec_unify(&[(t.clone(), t)], &[], &collect()).unwrap();
    assert_eq!(out.unifiers.len(), 1);
    let t = e("(f a ?X)");
    let out = letrec_unify(&[(t.clone(), t)], &[], &collect()).unwrap();
    assert!(out.unifiers[0].theta.is_empty());

    let cyc = [(e("?X"), e("(f ?Y)")), (e("?Y"), e("(g ?X)"))];
    let out = letrec_unify(&cyc, &[], &collect()).unwrap();
    assert!(out.unifiers.is_empty());
    assert_eq!(out.stats.failures.get("Cycle"), Some(&1));

    let out = letrec_unify(&[(e("?X"), e("?X"))], &[], &collect()).unwrap();
    assert_eq!(out.unifiers.len(), 1);
    let u = &out.unifiers[0];
    assert!(u.theta.is_empty() && u.nabla.is_empty() && u.fix.is_empty());

    let out = letrec_unify(&[(e("?X"), e("(perm ((a b)) ?X)"))], &[], &collect()).unwrap();
    assert_eq!(out.unifiers.len(), 1);
    assert_eq!(out.unifiers[0].fix, vec![(Var::new("X"), swap("a", "b"))]);
    let witness = g("(letrec ((c a) (d b)) True)");
    assert!(alpha_eq(&witness.permute(&swap("a", "b")), &witness));
}

#[test]
fn fixpoints() {
    let dup = [(e("?X"), e("(perm ((a b)) ?X)")), (e("?X"), e("(perm ((a b)) ?X)"))];
    let out = letrec_unify(&dup, &[], &Config::default()).unwrap();
    assert_eq!(out.unifiers[0].fix.len(), 1);

    let gf = Config { garbage_free: true, ..collect() };
    let out = letrec_unify(&[(e("?X"), e("(perm ((a b)) ?X)"))], &[], &gf).unwrap();
    let u = &out.unifiers[0];
    assert!(u.fix.is_empty());
    assert_eq!(u.nabla, [(at("a"), Var::new("X")), (at("b"), Var::new("X"))].into_iter().collect());

    let out = letrec_unify(&[(e("?X"), e("?X"))], &[], &gf).unwrap();
    assert!(out.unifiers[0].nabla.is_empty());

    let out = letrec_unify(&[(e("(lam c ?X)"), e("(lam d ?X)"))], &[], &gf).unwrap();
    assert!(out.unifiers[0].fix.is_empty());
    assert_eq!(out.unifiers[0].nabla, [(at("c"), Var::new("X")), (at("d"), Var::new("X"))].into_iter().collect());
}

#[test]
fn matching() {
    let out = letrec_match(&[(e("(app (lam c ?X1) ?X2)"), g("(app (lam a a) (lam b b))"))], Mode::Collecting, 1000).unwrap();
    assert_eq!(out.solutions.len(), 1);
    assert_eq!(out.solutions[0].vars[&Var::new("X1")], g("c"));
    assert_eq!(out.solutions[0].vars[&Var::new("X2")], g("(lam b b)"));

    let t = g("(letrec ((a (f a)) (b a)) (g b))");
    let out = letrec_match(&[(e("?X"), t.clone())], Mode::Collecting, 1000).unwrap();
    assert_eq!(out.solutions[0].vars[&Var::new("X")], t);

    let out = letrec_match(&[(e("(lam c c)"), g("(lam b a)"))], Mode::Collecting, 1000).unwrap();
    assert!(out.solutions.is_empty());
}

fn ham(name: &str) -> bool {
    let (p, t) = encode_hamiltonian(&Graph::named(name).unwrap()).unwrap();
    !letrec_match(&[(p, t)], Mode::Decision, 1_000_000).unwrap().solutions.is_empty()
}

fn iso(a: &Graph, b: &Graph) -> bool {
    let (p, t) = encode_graph_iso(a, b).unwrap();
    !letrec_match(&[(p, t)], Mode::Decision, 1_000_000).unwrap().solutions.is_empty()
}

#[test]
fn encoders() {
    assert!(ham("k4"));
    assert!(!ham("petersen"));
    assert!(ham("k33"));
    let tri = Graph::named("c3").unwrap();
    assert!(iso(&tri, &tri));
    assert!(!iso(&Graph::named("c6").unwrap(), &Graph::named("2c3").unwrap()));
    let c5 = Graph::named("c5").unwrap();
    assert!(iso(&c5, &c5.relabel(&[2, 4, 1, 3, 0])));
}

#[test]
fn grammar() {
    let mut gr = Grammar::new();
    let id = gr.id();
    assert!(gr.eval(id, &Assign::new()).unwrap().is_id());
    let a = |s: &str| GW::plain(V::Atom(at(s)));
    let (ab, bc) = (gr.swap(a("a"), a("b")), gr.swap(a("b"), a("c")));
    let p = gr.compose(ab, bc);
    assert_eq!(gr.eval(p, &Assign::new()).unwrap().apply(at("a")), at("b"));
    let back = gr.compose(gr.inverse(p), p);
    assert!(gr.ground_simplify(back).unwrap().is_id());
    assert!(gr.ground_simplify(id).unwrap().is_id());

    let mut q = gr.id();
    for i in 0..20 {
        let s = gr.swap(a(["a", "b", "c"][i % 3]), a(["b", "c", "a"][i % 3]));
        q = gr.compose(s, q);
    }
    assert!(gr.ground_simplify(q).unwrap().pairs().len() <= 3);
}

#[test]
fn atom_variable_unification() {
    let run = |src: &str| {
        let p = parse_problem(src).unwrap();
        letrec_unify_av(&p.eqs, &p.fresh, &AvConfig::default()).unwrap()
    };
    assert!(run(include_str!("../examples/av-unsat.prob")).unifiers.is_empty());
    assert!(!run(include_str!("../examples/av-sat.prob")).unifiers.is_empty());
    let out = run("(problem (eq ?X ?X))");
    assert_eq!(out.unifiers.len(), 1);
    assert!(out.unifiers[0].theta.is_empty() && out.unifiers[0].fix.is_empty());
}

#[test]
fn environment_matching() {
    let run = |p: &str, t: &str| env_match(&[(parse_term(p).unwrap(), g(t))], &[], Mode::Collecting, 100_000).unwrap();
    let env = |s: &nomlet::envmatch::EnvSolution, n: &str| s.subst.envs[&EnvVar::new(n)].clone();

    let out = run("(letrec (%E1) (letrec (%E2) ?X))", "(letrec ((a 0) (b 1)) (letrec ((c (t a b c))) c))");
    assert_eq!(out.solutions.len(), 1);
    let s = &out.solutions[0];
    assert_eq!(env(s, "E1"), vec![(at("a"), g("0")), (at("b"), g("1"))]);
    assert_eq!(env(s, "E2"), vec![(at("c"), g("(t a b c)"))]);
    assert_eq!(s.subst.vars[&Var::new("X")], g("c"));

    let out = run("(letrec (%E) ?X)", "(letrec ((a 0)) a)");
    let s = &out.solutions[0];
    assert_eq!(env(s, "E"), vec![(at("a"), g("0"))]);
    assert_eq!(s.subst.vars[&Var::new("X")], g("a"));

    let out = run("(letrec ((a ?X) %E) a)", "(letrec ((b 0)) b)");
    let s = &out.solutions[0];
    assert!(env(s, "E").is_empty());
    assert_eq!(s.subst.vars[&Var::new("X")], g("0"));
}

#[test]
fn oracles() {
    let space = oracle::ground_exprs(&[at("a"), at("b"), at("c")], &[], 2, true);
    let sols = oracle::enum_ground_solutions(&[(e("?X"), g("a"))], &[], &space);
    assert_eq!(sols.len(), 1);
    assert!(oracle::enum_ground_solutions(&[(g("a"), g("b"))], &[], &space).is_empty());
    let t = g("(letrec ((c a) (d b)) True)");
    assert!(oracle::alpha_eq_naive(&t, &t));
    assert!(oracle::alpha_eq_naive(&t.permute(&swap("a", "b")), &t));
    assert!(!oracle::alpha_eq_naive(&g("(lam a a)"), &g("(lam a b)")));
    assert_eq!(oracle::ham_cycle(&Graph::named("k4").unwrap()), Ok(true));
    assert_eq!(oracle::ham_cycle(&Graph::named("petersen").unwrap()), Ok(false));
}
