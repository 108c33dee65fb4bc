#![allow(dead_code)]

use nomlet::alpha::{alpha_eq, match_all, Mode};
use nomlet::freshness::check_ground;
use nomlet::graph::{random_cubic, Graph};
use nomlet::name::{fresh_atom, Atom, AtomVar, Fun, Var};
use nomlet::pattern::Pat;
use nomlet::perm::Perm;
use nomlet::syntax::{Item, SPerm, Term, V, W};
use nomlet::term::Expr;
use nomlet::unify::Unifier;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type Eq = (Expr, Expr);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|s| Atom::new(s)).collect()
}

pub fn random_perm(r: &mut ChaCha8Rng, pool: &[Atom], max_swaps: usize) -> Perm {
    let k = r.gen_range(0..=max_swaps);
    Perm::from_swaps((0..k).map(|_| (*pool.choose(r).unwrap(), *pool.choose(r).unwrap())).filter(|(a, b)| a != b))
}

/// A random expression of roughly `size` nodes. Suspensions carry up to two
/// swaps; letrec environments have one to three bindings with distinct
/// binders.
pub fn random_expr(r: &mut ChaCha8Rng, size: usize, pool: &[Atom], vars: &[Var], letrec: bool) -> Expr {
    if size <= 1 {
        let k = r.gen_range(0..10);
        return if k < 4 || vars.is_empty() && k < 8 {
            Expr::Atom(*pool.choose(r).unwrap())
        } else if k < 8 {
            Expr::Susp(random_perm(r, pool, 2), *vars.choose(r).unwrap())
        } else {
            Expr::konst("c")
        };
    }
    match r.gen_range(0..10) {
        0..=2 => Expr::Lam(*pool.choose(r).unwrap(), Box::new(random_expr(r, size - 1, pool, vars, letrec))),
        3..=4 => Expr::app("g", vec![random_expr(r, size - 1, pool, vars, letrec)]),
        5..=7 => {
            let k = r.gen_range(1..size.max(2));
            Expr::app("f", vec![random_expr(r, k, pool, vars, letrec), random_expr(r, size - k.min(size - 1), pool, vars, letrec)])
        }
        _ if letrec && size >= 3 => {
            let n = r.gen_range(1..=3usize.min(pool.len()));
            let mut binders = pool.to_vec();
            binders.shuffle(r);
            let share = (size - 1) / (n + 1);
            let env = binders[..n].iter().map(|a| (*a, random_expr(r, share.max(1), pool, vars, letrec))).collect();
            Expr::Letrec(env, Box::new(random_expr(r, share.max(1), pool, vars, letrec)))
        }
        _ => Expr::app("g", vec![random_expr(r, size - 1, pool, vars, letrec)]),
    }
}

pub fn random_ground(r: &mut ChaCha8Rng, size: usize, pool: &[Atom]) -> Expr {
    random_expr(r, size, pool, &[], true)
}

/// An alpha-variant: every binder is renamed to a fresh atom and every
/// letrec environment is shuffled.
pub fn alpha_variant(r: &mut ChaCha8Rng, e: &Expr, counter: &mut usize) -> Expr {
    let mut fresh = || {
        *counter += 1;
        Atom::new(&format!("r{counter}"))
    };
    match e {
        Expr::Atom(_) | Expr::Susp(..) => e.clone(),
        Expr::Lam(a, b) => {
            let a2 = fresh();
            let b = alpha_variant(r, b, counter);
            Expr::Lam(a2, Box::new(b.permute(&Perm::swap(*a, a2))))
        }
        Expr::App(f, args) => Expr::App(*f, args.iter().map(|x| alpha_variant(r, x, counter)).collect()),
        Expr::Letrec(env, b) => {
            let mut p = Perm::id();
            for (a, _) in env {
                p = Perm::swap(*a, fresh()).compose(&p);
            }
            let mut env2: Vec<(Atom, Expr)> = env.iter().map(|(a, t)| (p.apply(*a), alpha_variant(r, t, counter).permute(&p))).collect();
            env2.shuffle(r);
            Expr::Letrec(env2, Box::new(alpha_variant(r, b, counter).permute(&p)))
        }
    }
}

/// Replaces some subterms by fresh variables `Y<k>`.
pub fn generalize(r: &mut ChaCha8Rng, e: &Expr, next: &mut usize) -> Expr {
    if r.gen_bool(0.15) {
        *next += 1;
        return Expr::var(Var::new(&format!("Y{next}")));
    }
    match e {
        Expr::Atom(_) | Expr::Susp(..) => e.clone(),
        Expr::Lam(a, b) => Expr::Lam(*a, Box::new(generalize(r, b, next))),
        Expr::App(f, args) => Expr::App(*f, args.iter().map(|x| generalize(r, x, next)).collect()),
        Expr::Letrec(env, b) => {
            Expr::Letrec(env.iter().map(|(a, t)| (*a, generalize(r, t, next))).collect(), Box::new(generalize(r, b, next)))
        }
    }
}

pub fn problem_size(eqs: &[Eq]) -> usize {
    nomlet::unify::problem_size(eqs)
}

/// A unification problem of size at most `max_size`. About half are built
/// to be solvable (an alpha-variant of an instance against a
/// generalisation); the rest pair unrelated random expressions.
pub fn random_problem(r: &mut ChaCha8Rng, max_size: usize) -> (Vec<Eq>, Vec<(Atom, Expr)>) {
    let pool = atoms(&["a", "b", "c", "d"]);
    let vars: Vec<Var> = ["X", "Y", "Z"].iter().map(|s| Var::new(s)).collect();
    loop {
        let neq = r.gen_range(1..=2);
        let mut eqs = Vec::new();
        let mut counter = 0;
        let mut next = 0;
        for _ in 0..neq {
            let size = r.gen_range(3..=max_size / (2 * neq));
            match r.gen_range(0..3) {
                0 => {
                    let t = random_expr(r, size, &pool, &vars[..1], true);
                    let s = alpha_variant(r, &t, &mut counter);
                    eqs.push((generalize(r, &t, &mut next), s));
                }
                1 => {
                    let t = random_expr(r, size, &pool, &vars, true);
                    let x = *vars.choose(r).unwrap();
                    let others: Vec<Var> = vars.iter().copied().filter(|v| *v != x).collect();
                    let u = random_expr(r, 3, &pool, &others, false);
                    let tu = t.subst_map(&[(x, u)].into_iter().collect());
                    eqs.push((t, alpha_variant(r, &tu, &mut counter)));
                }
                _ => eqs.push((random_expr(r, size / 2 + 1, &pool, &vars, true), random_expr(r, size / 2 + 1, &pool, &vars, true))),
            }
        }
        let mut fresh = Vec::new();
        if r.gen_bool(0.3) {
            fresh.push((*pool.choose(r).unwrap(), Expr::var(*vars.choose(r).unwrap())));
        }
        if problem_size(&eqs) <= max_size {
            return (eqs, fresh);
        }
    }
}

pub fn vars_of(eqs: &[Eq], fresh: &[(Atom, Expr)]) -> BTreeSet<Var> {
    let mut vs = BTreeSet::new();
    for (s, t) in eqs {
        s.collect_vars(&mut vs);
        t.collect_vars(&mut vs);
    }
    for (_, e) in fresh {
        e.collect_vars(&mut vs);
    }
    vs
}

/// An atom occurring nowhere in the problem or the unifier.
pub fn outside_atom(eqs: &[Eq], fresh: &[(Atom, Expr)], u: &Unifier) -> Atom {
    let mut all = u.atoms();
    for (s, t) in eqs {
        s.collect_atoms(&mut all);
        t.collect_atoms(&mut all);
    }
    for (a, e) in fresh {
        all.insert(*a);
        e.collect_atoms(&mut all);
    }
    fresh_atom(all.iter())
}

/// Instantiates every free variable of `u` with a fresh atom and checks
/// the result against the problem.
pub fn verify_unifier(eqs: &[Eq], fresh: &[(Atom, Expr)], u: &Unifier) -> bool {
    let z = outside_atom(eqs, fresh, u);
    let rho = u.ground_with(&vars_of(eqs, fresh), z);
    eqs.iter().all(|(s, t)| alpha_eq(&s.subst_map(&rho), &t.subst_map(&rho))) && check_ground(fresh.iter().map(|(a, e)| (*a, e)), &rho)
}

/// Is the ground substitution `rho` an instance of `u`? Matches every
/// `Xθ` against `Xρ` and checks the remaining constraints on each match.
pub fn is_instance(u: &Unifier, rho: &BTreeMap<Var, Expr>) -> bool {
    let sub = u.substitution();
    let eqs: Vec<(Pat, Expr)> =
        rho.iter().map(|(x, g)| (Pat::from(&sub.get(x).cloned().unwrap_or_else(|| Expr::var(*x))), g.clone())).collect();
    let Ok(out) = match_all(&eqs, Mode::Collecting, 1_000_000) else {
        return false;
    };
    out.solutions.iter().any(|s| {
        let sigma = &s.vars;
        u.nabla.iter().all(|(a, x)| sigma.get(x).is_none_or(|e| !e.is_free_in(*a)))
            && u.fix.iter().all(|(x, p)| sigma.get(x).is_none_or(|e| alpha_eq(&e.permute(p), e)))
    })
}

/// Unordered pairs of distinct sides from a fixed exhaustive class: leaves
/// `a b c X Y (a b)·X`, and one constructor (`g`, `f`, `λa`, `λb`,
/// single-binding letrec) over leaves.
pub fn small_problems() -> Vec<Eq> {
    let (a, b) = (Atom::new("a"), Atom::new("b"));
    let (x, y) = (Var::new("X"), Var::new("Y"));
    let leaves = vec![Expr::Atom(a), Expr::Atom(b), Expr::konst("c"), Expr::var(x), Expr::var(y), Expr::Susp(Perm::swap(a, b), x)];
    let mut sides = leaves.clone();
    for l in &leaves {
        sides.push(Expr::app("g", vec![l.clone()]));
        sides.push(Expr::Lam(a, Box::new(l.clone())));
        sides.push(Expr::Lam(b, Box::new(l.clone())));
        for m in &leaves {
            sides.push(Expr::app("f", vec![l.clone(), m.clone()]));
            sides.push(Expr::Letrec(vec![(a, l.clone())], Box::new(m.clone())));
        }
    }
    let mut out = Vec::new();
    for i in 0..sides.len() {
        for j in i + 1..sides.len() {
            out.push((sides[i].clone(), sides[j].clone()));
        }
    }
    out
}

pub fn small_signature() -> Vec<(Fun, usize)> {
    vec![(Fun::new("f"), 2), (Fun::new("g"), 1), (Fun::new("c"), 0)]
}

pub fn cubic_corpus() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> =
        ["k4", "k33", "prism", "cube", "petersen"].iter().map(|n| (n.to_string(), Graph::named(n).unwrap())).collect();
    for n in [6, 8, 10] {
        for seed in 0..4 {
            out.push((format!("cubic{n}/{seed}"), random_cubic(n, seed)));
        }
    }
    out
}

/// Pairs of regular graphs on at most 8 vertices.
pub fn iso_corpus() -> Vec<(String, Graph, Graph)> {
    let g = |n: &str| Graph::named(n).unwrap();
    let mut r = rng(7);
    let mut shuffled = |h: &Graph| {
        let mut p: Vec<usize> = (0..h.n()).collect();
        p.shuffle(&mut r);
        h.relabel(&p)
    };
    let mut out = vec![
        ("c6~2c3".to_string(), g("c6"), g("2c3")),
        ("c5~c5'".to_string(), g("c5"), shuffled(&g("c5"))),
        ("c8~c8'".to_string(), g("c8"), shuffled(&g("c8"))),
        ("k4~k4'".to_string(), g("k4"), shuffled(&g("k4"))),
        ("k33~prism".to_string(), g("k33"), g("prism")),
        ("prism~prism'".to_string(), g("prism"), shuffled(&g("prism"))),
        ("cube~cube'".to_string(), g("cube"), shuffled(&g("cube"))),
        ("k5~k5'".to_string(), g("k5"), shuffled(&g("k5"))),
    ];
    for seed in 0..4 {
        let (a, b) = (random_cubic(8, seed), random_cubic(8, seed + 10));
        out.push((format!("cubic8/{seed}~cubic8/{}", seed + 10), a.clone(), b));
        out.push((format!("cubic8/{seed}~shuffled"), a.clone(), shuffled(&a)));
    }
    out
}

/// Replaces atoms by atom variables throughout a term, binders included.
pub fn avarize(t: &Term, m: &HashMap<Atom, AtomVar>) -> Term {
    let w = |w: &W| W { perm: sperm(&w.perm, m), v: v(&w.v, m) };
    match t {
        Term::Atom(x) => Term::Atom(w(x)),
        Term::Susp(p, x) => Term::Susp(sperm(p, m), *x),
        Term::Lam(x, b) => Term::Lam(w(x), Box::new(avarize(b, m))),
        Term::App(f, args) => Term::App(*f, args.iter().map(|a| avarize(a, m)).collect()),
        Term::Letrec(env, b) => Term::Letrec(
            env.iter()
                .map(|it| match it {
                    Item::Bind(x, e) => Item::Bind(w(x), avarize(e, m)),
                    Item::Env(e) => Item::Env(*e),
                })
                .collect(),
            Box::new(avarize(b, m)),
        ),
    }
}

fn v(x: &V, m: &HashMap<Atom, AtomVar>) -> V {
    match x {
        V::Atom(a) => m.get(a).map_or(*x, |av| V::Var(*av)),
        V::Var(_) => *x,
    }
}

fn sperm(p: &SPerm, m: &HashMap<Atom, AtomVar>) -> SPerm {
    SPerm(p.0.iter().map(|(a, b)| (W { perm: sperm(&a.perm, m), v: v(&a.v, m) }, W { perm: sperm(&b.perm, m), v: v(&b.v, m) })).collect())
}

/// An atom-variable problem with at most two atom variables: a random
/// expression against an alpha-variant, with some atoms on the left turned
/// into atom variables. Roughly one in three right-hand sides is perturbed.
pub fn random_av_problem(r: &mut ChaCha8Rng, size: usize) -> (Vec<(Term, Term)>, Vec<(W, Term)>) {
    let pool = atoms(&["a", "b", "c"]);
    let vars = [Var::new("X")];
    let t = random_expr(r, size, &pool, &vars, true);
    let mut counter = 0;
    let mut s = alpha_variant(r, &t, &mut counter);
    if r.gen_bool(0.33) {
        let from = *pool.choose(r).unwrap();
        let to = *pool.iter().filter(|a| **a != from).collect::<Vec<_>>().choose(r).unwrap();
        s = s.rename_free(&[(from, *to)].into_iter().collect());
    }
    let mut m = HashMap::new();
    let mut names = pool.clone();
    names.shuffle(r);
    for (i, a) in names.iter().take(r.gen_range(1..=2)).enumerate() {
        m.insert(*a, AtomVar::new(["A", "B"][i]));
    }
    (vec![(avarize(&Term::from(&t), &m), Term::from(&s))], Vec::new())
}
