mod common;

use common::*;
use nomlet::alpha::{alpha_eq, Mode};
use nomlet::av::{letrec_unify_av, unify_av_baseline, AvConfig};
use nomlet::envmatch::env_match;
use nomlet::freshness::{check_atomic, simplify};
use nomlet::graph::random_cubic;
use nomlet::matching::{encode_hamiltonian, letrec_match};
use nomlet::name::{Atom, Var};
use nomlet::oracle;
use nomlet::perm::Perm;
use nomlet::permgroup::Chain;
use nomlet::sexp::{parse_ground, parse_term};
use nomlet::term::Expr;
use nomlet::unify::{letrec_unify, Config};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, HashSet};

fn closure(gens: &[Perm]) -> HashSet<Perm> {
    let mut seen: HashSet<Perm> = [Perm::id()].into_iter().collect();
    let mut todo = vec![Perm::id()];
    while let Some(p) = todo.pop() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                todo.push(q);
            }
        }
    }
    seen
}

fn subterms(e: &Expr, out: &mut Vec<Expr>) {
    out.push(e.clone());
    match e {
        Expr::Atom(_) | Expr::Susp(..) => {}
        Expr::Lam(_, b) => subterms(b, out),
        Expr::App(_, args) => args.iter().for_each(|a| subterms(a, out)),
        Expr::Letrec(env, b) => {
            env.iter().for_each(|(_, t)| subterms(t, out));
            subterms(b, out)
        }
    }
}

fn all_perms(pool: &[Atom]) -> Vec<Perm> {
    let gens: Vec<Perm> = pool.windows(2).map(|w| Perm::swap(w[0], w[1])).collect();
    closure(&gens).into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn alpha_eq_agrees_with_naive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = atoms(&["a", "b", "c", "d", "e"]);
        let s = { let n = r.gen_range(1..10); random_ground(&mut r, n, &pool) };
        let t = if r.gen_bool(0.5) {
            let mut k = 0;
            alpha_variant(&mut r, &s, &mut k).rename_free(&[(pool[0], pool[1])].into_iter().collect())
        } else {
            { let n = r.gen_range(1..10); random_ground(&mut r, n, &pool) }
        };
        prop_assert_eq!(alpha_eq(&s, &t), oracle::alpha_eq_naive(&s, &t));
    }

    #[test]
    fn alpha_variants_are_equivalent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = atoms(&["a", "b", "c", "d"]);
        let s = { let n = r.gen_range(1..20); random_ground(&mut r, n, &pool) };
        let mut k = 0;
        let t = alpha_variant(&mut r, &s, &mut k);
        prop_assert!(alpha_eq(&s, &t));
        prop_assert!(alpha_eq(&t, &s));
        let p = random_perm(&mut r, &pool, 3);
        prop_assert!(alpha_eq(&s.permute(&p), &t.permute(&p)));
        prop_assert_eq!(s.free_atoms(), t.free_atoms());
    }

    #[test]
    fn garbage_free_equivariance(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = atoms(&["a", "b", "c", "d"]);
        let e = { let n = r.gen_range(1..14); random_ground(&mut r, n, &pool) }.collect_garbage();
        prop_assert!(e.is_garbage_free());
        let p = random_perm(&mut r, &pool, 2);
        let fa = e.free_atoms();
        prop_assert_eq!(alpha_eq(&e.permute(&p), &e), p.domain_iter().all(|a| !fa.contains(&a)));
    }

    #[test]
    fn membership_agrees_with_closure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = atoms(&["a", "b", "c", "d", "e", "f"]);
        let gens: Vec<Perm> = (0..r.gen_range(1..4)).map(|_| random_perm(&mut r, &pool, 3)).collect();
        let group = closure(&gens);
        let chain = Chain::new(&gens);
        prop_assert_eq!(chain.order(), group.len() as u128);
        for _ in 0..10 {
            let p = random_perm(&mut r, &pool, 4);
            prop_assert_eq!(chain.contains(&p), group.contains(&p));
        }
    }

    #[test]
    fn freshness_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = atoms(&["a", "b", "c"]);
        let e = { let n = r.gen_range(1..6); random_expr(&mut r, n, &pool, &[Var::new("X")], true) };
        let a = *pool.choose(&mut r).unwrap();
        let space = oracle::ground_exprs(&pool, &small_signature(), 2, true);
        let verdict = simplify([(a, &e)]);
        let x = Var::new("X");
        let mut any = false;
        for v in &space {
            let rho: BTreeMap<Var, Expr> = [(x, v.clone())].into_iter().collect();
            let holds = !e.subst_map(&rho).is_free_in(a);
            any |= holds;
            if let Some(cs) = &verdict {
                prop_assert_eq!(check_atomic(cs, &rho), holds);
            }
        }
        prop_assert_eq!(verdict.is_some(), any);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unifiers_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (eqs, fresh) = random_problem(&mut r, 60);
        let all = letrec_unify(&eqs, &fresh, &Config { mode: Mode::Collecting, budget: 200_000, ..Config::default() });
        let first = letrec_unify(&eqs, &fresh, &Config::default()).unwrap();
        for u in &first.unifiers {
            prop_assert!(verify_unifier(&eqs, &fresh, u), "{}", u);
        }
        if let Ok(all) = all {
            prop_assert_eq!(all.unifiers.is_empty(), first.unifiers.is_empty());
            for u in &all.unifiers {
                prop_assert!(verify_unifier(&eqs, &fresh, u), "{}", u);
            }
        }
    }

    #[test]
    fn parallel_search_finds_the_same_unifiers(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (eqs, fresh) = random_problem(&mut r, 40);
        let cfg = Config { mode: Mode::Collecting, budget: 200_000, ..Config::default() };
        if let Ok(one) = letrec_unify(&eqs, &fresh, &cfg) {
            let many = letrec_unify(&eqs, &fresh, &Config { jobs: 3, ..cfg }).unwrap();
            prop_assert_eq!(one.unifiers, many.unifiers);
        }
    }

    #[test]
    fn measure_decreases_outside_merges(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (eqs, fresh) = random_problem(&mut r, 60);
        let cfg = Config { trace: true, ..Config::default() };
        let out = letrec_unify(&eqs, &fresh, &cfg).unwrap();
        prop_assert!(out.stats.measure_violations.keys().all(|k| *k == "MMS"));
        prop_assert_eq!(out.stats.core_violations, 0);
    }

    #[test]
    fn matching_agrees_with_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = atoms(&["a", "b", "c"]);
        let vars = [Var::new("X"), Var::new("Y")];
        let p = { let n = r.gen_range(2..6); random_expr(&mut r, n, &pool, &vars, true) };
        let sigma: BTreeMap<Var, Expr> = vars.iter().map(|x| (*x, { let n = r.gen_range(1..4); random_ground(&mut r, n, &pool) })).collect();
        let t = p.subst_map(&sigma);
        prop_assume!(t.size() <= 12);
        let pvars: Vec<Var> = p.vars().into_iter().collect();

        let mut cands = Vec::new();
        let mut subs = Vec::new();
        subterms(&t, &mut subs);
        for pi in all_perms(&pool) {
            for s in &subs {
                let c = s.permute(&pi);
                if !cands.iter().any(|d| oracle::alpha_eq_naive(d, &c)) {
                    cands.push(c);
                }
            }
        }
        let mut brute: Vec<BTreeMap<Var, Expr>> = Vec::new();
        let mut idx = vec![0usize; pvars.len()];
        loop {
            let rho: BTreeMap<Var, Expr> = pvars.iter().zip(&idx).map(|(x, i)| (*x, cands[*i].clone())).collect();
            if oracle::alpha_eq_naive(&oracle::ground_subst(&p, &rho).unwrap(), &t) {
                brute.push(rho);
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < cands.len() { break; }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() { break; }
        }

        let out = letrec_match(&[(p.clone(), t.clone())], Mode::Collecting, 1_000_000).unwrap();
        let same = |a: &BTreeMap<Var, Expr>, b: &BTreeMap<Var, Expr>| pvars.iter().all(|x| alpha_eq(&a[x], &b[x]));
        for b in &brute {
            prop_assert!(out.solutions.iter().any(|s| same(&s.vars, b)));
        }
        for s in &out.solutions {
            prop_assert!(brute.iter().any(|b| same(&s.vars, b)));
        }
    }

    #[test]
    fn environment_slot_choices(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let names = ["p", "q", "u", "v"];
        let binds: Vec<String> = (0..n).map(|i| format!("({} (h{} {}))", names[i], i, names[r.gen_range(0..n)])).collect();
        let target = parse_ground(&format!("(letrec ({}) 0)", binds.join(" "))).unwrap();
        let pat = parse_term("(letrec ((a ?X) %E) 0)").unwrap();
        let out = env_match(&[(pat, target.clone())], &[], Mode::Collecting, 1_000_000).unwrap();
        prop_assert_eq!(out.solutions.len(), n);
        for s in &out.solutions {
            let rebuilt = parse_term("(letrec ((a ?X) %E) 0)").unwrap().to_pat().unwrap().instantiate(&s.subst).unwrap();
            prop_assert!(alpha_eq(&rebuilt, &target));
        }
    }

    #[test]
    fn av_agrees_with_baseline(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (eqs, fresh) = { let n = r.gen_range(2..10); random_av_problem(&mut r, n) };
        let out = letrec_unify_av(&eqs, &fresh, &AvConfig::default()).unwrap();
        let base = unify_av_baseline(&eqs, &fresh, 1_000_000).unwrap();
        prop_assert_eq!(!out.unifiers.is_empty(), base);
        prop_assert_eq!(out.stats.elimab_over_bound, 0);
    }
}

#[test]
fn hamiltonian_encoding_matches_search() {
    for n in [4, 6, 8, 10] {
        for seed in 0..5 {
            let g = random_cubic(n, seed);
            let (p, t) = encode_hamiltonian(&g).unwrap();
            let m = !letrec_match(&[(p, t)], Mode::Decision, 10_000_000).unwrap().solutions.is_empty();
            assert_eq!(m, oracle::ham_cycle(&g).unwrap(), "n={n} seed={seed}");
        }
    }
}

#[test]
fn garbage_free_mode_agrees_without_fixpoints() {
    let gf = Config { mode: Mode::Collecting, garbage_free: true, ..Config::default() };
    let std = Config { mode: Mode::Collecting, ..Config::default() };
    let mut compared = 0;
    for (s, t) in small_problems().into_iter().step_by(7) {
        let eqs = [(s, t)];
        let a = letrec_unify(&eqs, &[], &std).unwrap();
        if a.unifiers.iter().all(|u| u.fix.is_empty()) {
            let b = letrec_unify(&eqs, &[], &gf).unwrap();
            assert_eq!(a.unifiers.is_empty(), b.unifiers.is_empty(), "{:?}", eqs);
            compared += 1;
        }
    }
    assert!(compared > 100);
}

#[test]
fn small_problem_class_is_exhaustive() {
    let ps = small_problems();
    let sides: BTreeSet<String> = ps.iter().flat_map(|(s, t)| [s.to_string(), t.to_string()]).collect();
    assert_eq!(sides.len(), 96);
    assert_eq!(ps.len(), 96 * 95 / 2);
    assert!(ps.iter().all(|(s, t)| s.depth() <= 2 && t.depth() <= 2));
    let _ = Atom::new("a");
}
