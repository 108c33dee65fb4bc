//! Expressions of the letrec language with expression variables, and the
//! ground operations on them: permutation action, free atoms, garbage.

use crate::name::{Atom, AtomSupply, Fun, Var};
use crate::perm::Perm;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// An expression. Ground expressions contain no `Susp`.
///
/// Letrec environments are kept in the order they were written, but every
/// semantic operation treats them as multisets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Expr {
    Atom(Atom),
    /// `π·X`
    Susp(Perm, Var),
    Lam(Atom, Box<Expr>),
    App(Fun, Vec<Expr>),
    Letrec(Vec<(Atom, Expr)>, Box<Expr>),
}

impl Expr {
    pub fn var(x: Var) -> Expr {
        Expr::Susp(Perm::id(), x)
    }

    pub fn atom(s: &str) -> Expr {
        Expr::Atom(crate::name::Atom::new(s))
    }

    pub fn lam(a: Atom, body: Expr) -> Expr {
        Expr::Lam(a, Box::new(body))
    }

    pub fn app(f: &str, args: Vec<Expr>) -> Expr {
        Expr::App(Fun::new(f), args)
    }

    pub fn konst(f: &str) -> Expr {
        Expr::App(Fun::new(f), Vec::new())
    }

    pub fn letrec(env: Vec<(Atom, Expr)>, body: Expr) -> Expr {
        Expr::Letrec(env, Box::new(body))
    }

    pub fn is_susp(&self) -> bool {
        matches!(self, Expr::Susp(..))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Expr::Atom(_) => true,
            Expr::Susp(..) => false,
            Expr::Lam(_, e) => e.is_ground(),
            Expr::App(_, args) => args.iter().all(Expr::is_ground),
            Expr::Letrec(env, body) => env.iter().all(|(_, e)| e.is_ground()) && body.is_ground(),
        }
    }

    /// `π·e`, pushed down to the leaves. Binders are renamed as well.
    pub fn permute(&self, p: &Perm) -> Expr {
        if p.is_id() {
            return self.clone();
        }
        match self {
            Expr::Atom(a) => Expr::Atom(p.apply(*a)),
            Expr::Susp(q, x) => Expr::Susp(p.compose(q), *x),
            Expr::Lam(a, e) => Expr::Lam(p.apply(*a), Box::new(e.permute(p))),
            Expr::App(f, args) => Expr::App(*f, args.iter().map(|e| e.permute(p)).collect()),
            Expr::Letrec(env, body) => {
                Expr::Letrec(env.iter().map(|(a, e)| (p.apply(*a), e.permute(p))).collect(), Box::new(body.permute(p)))
            }
        }
    }

    /// Number of nodes, not counting permutations.
    pub fn size(&self) -> usize {
        match self {
            Expr::Atom(_) | Expr::Susp(..) => 1,
            Expr::Lam(_, e) => 1 + e.size(),
            Expr::App(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Letrec(env, body) => 1 + env.iter().map(|(_, e)| 1 + e.size()).sum::<usize>() + body.size(),
        }
    }

    /// Number of nodes plus the atoms stored in permutations.
    pub fn size_with_perms(&self) -> usize {
        match self {
            Expr::Atom(_) => 1,
            Expr::Susp(p, _) => 1 + p.pairs().len(),
            Expr::Lam(_, e) => 1 + e.size_with_perms(),
            Expr::App(_, args) => 1 + args.iter().map(Expr::size_with_perms).sum::<usize>(),
            Expr::Letrec(env, body) => 1 + env.iter().map(|(_, e)| 1 + e.size_with_perms()).sum::<usize>() + body.size_with_perms(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Atom(_) | Expr::Susp(..) => 1,
            Expr::Lam(_, e) => 1 + e.depth(),
            Expr::App(_, args) => 1 + args.iter().map(Expr::depth).max().unwrap_or(0),
            Expr::Letrec(env, body) => 1 + env.iter().map(|(_, e)| e.depth()).chain([body.depth()]).max().unwrap(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Atom(_) => {}
            Expr::Susp(_, x) => {
                out.insert(*x);
            }
            Expr::Lam(_, e) => e.collect_vars(out),
            Expr::App(_, args) => args.iter().for_each(|e| e.collect_vars(out)),
            Expr::Letrec(env, body) => {
                env.iter().for_each(|(_, e)| e.collect_vars(out));
                body.collect_vars(out)
            }
        }
    }

    pub fn has_var(&self, x: Var) -> bool {
        match self {
            Expr::Atom(_) => false,
            Expr::Susp(_, y) => *y == x,
            Expr::Lam(_, e) => e.has_var(x),
            Expr::App(_, args) => args.iter().any(|e| e.has_var(x)),
            Expr::Letrec(env, body) => env.iter().any(|(_, e)| e.has_var(x)) || body.has_var(x),
        }
    }

    /// Every atom that occurs anywhere, including binders and permutations.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Expr::Atom(a) => {
                out.insert(*a);
            }
            Expr::Susp(p, _) => out.extend(p.domain_iter()),
            Expr::Lam(a, e) => {
                out.insert(*a);
                e.collect_atoms(out)
            }
            Expr::App(_, args) => args.iter().for_each(|e| e.collect_atoms(out)),
            Expr::Letrec(env, body) => {
                for (a, e) in env {
                    out.insert(*a);
                    e.collect_atoms(out);
                }
                body.collect_atoms(out)
            }
        }
    }

    /// Free atoms of a ground expression. Suspensions contribute nothing.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
        match self {
            Expr::Atom(a) => {
                if !bound.contains(a) {
                    out.insert(*a);
                }
            }
            Expr::Susp(..) => {}
            Expr::Lam(a, e) => {
                bound.push(*a);
                e.collect_free(bound, out);
                bound.pop();
            }
            Expr::App(_, args) => args.iter().for_each(|e| e.collect_free(bound, out)),
            Expr::Letrec(env, body) => {
                let n = bound.len();
                bound.extend(env.iter().map(|(a, _)| *a));
                env.iter().for_each(|(_, e)| e.collect_free(bound, out));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn is_free_in(&self, a: Atom) -> bool {
        match self {
            Expr::Atom(b) => *b == a,
            Expr::Susp(..) => false,
            Expr::Lam(b, e) => *b != a && e.is_free_in(a),
            Expr::App(_, args) => args.iter().any(|e| e.is_free_in(a)),
            Expr::Letrec(env, body) => {
                !env.iter().any(|(b, _)| *b == a) && (env.iter().any(|(_, e)| e.is_free_in(a)) || body.is_free_in(a))
            }
        }
    }

    /// Atoms occurring in binding position.
    pub fn bound_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_bound(&mut out);
        out
    }

    fn collect_bound(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Expr::Atom(_) | Expr::Susp(..) => {}
            Expr::Lam(a, e) => {
                out.insert(*a);
                e.collect_bound(out)
            }
            Expr::App(_, args) => args.iter().for_each(|e| e.collect_bound(out)),
            Expr::Letrec(env, body) => {
                for (a, e) in env {
                    out.insert(*a);
                    e.collect_bound(out);
                }
                body.collect_bound(out)
            }
        }
    }

    /// Replaces variables by the expressions in `s`, applying the suspended
    /// permutation to the replacement.
    pub fn subst(&self, s: &dyn Fn(Var) -> Option<Expr>) -> Expr {
        match self {
            Expr::Atom(_) => self.clone(),
            Expr::Susp(p, x) => match s(*x) {
                Some(e) => e.permute(p),
                None => self.clone(),
            },
            Expr::Lam(a, e) => Expr::Lam(*a, Box::new(e.subst(s))),
            Expr::App(f, args) => Expr::App(*f, args.iter().map(|e| e.subst(s)).collect()),
            Expr::Letrec(env, body) => Expr::Letrec(env.iter().map(|(a, e)| (*a, e.subst(s))).collect(), Box::new(body.subst(s))),
        }
    }

    pub fn subst_map(&self, m: &BTreeMap<Var, Expr>) -> Expr {
        self.subst(&|x| m.get(&x).cloned())
    }

    /// Renames free atoms according to `m`, renaming inner binders first
    /// where they would capture a new name.
    pub fn rename_free(&self, m: &HashMap<Atom, Atom>) -> Expr {
        if m.iter().all(|(a, b)| a == b) {
            return self.clone();
        }
        let mut avoid = self.atoms();
        avoid.extend(m.keys().copied());
        avoid.extend(m.values().copied());
        let mut supply = AtomSupply::avoiding(&avoid);
        let taboo: BTreeSet<Atom> = m.values().copied().collect();
        let clean = self.freshen_binders(&taboo, &mut supply, &mut HashMap::new());
        clean.rename_free_raw(m, &mut Vec::new())
    }

    fn freshen_binders(&self, taboo: &BTreeSet<Atom>, supply: &mut AtomSupply, ren: &mut HashMap<Atom, Vec<Atom>>) -> Expr {
        let look = |ren: &HashMap<Atom, Vec<Atom>>, a: Atom| ren.get(&a).and_then(|v| v.last().copied()).unwrap_or(a);
        match self {
            Expr::Atom(a) => Expr::Atom(look(ren, *a)),
            Expr::Susp(..) => self.clone(),
            Expr::Lam(a, e) => {
                let b = if taboo.contains(a) { supply.fresh() } else { *a };
                ren.entry(*a).or_default().push(b);
                let body = e.freshen_binders(taboo, supply, ren);
                ren.get_mut(a).unwrap().pop();
                Expr::Lam(b, Box::new(body))
            }
            Expr::App(f, args) => Expr::App(*f, args.iter().map(|e| e.freshen_binders(taboo, supply, ren)).collect()),
            Expr::Letrec(env, body) => {
                let new: Vec<Atom> = env.iter().map(|(a, _)| if taboo.contains(a) { supply.fresh() } else { *a }).collect();
                for ((a, _), b) in env.iter().zip(&new) {
                    ren.entry(*a).or_default().push(*b);
                }
                let env2 = env.iter().zip(&new).map(|((_, e), b)| (*b, e.freshen_binders(taboo, supply, ren))).collect();
                let body2 = body.freshen_binders(taboo, supply, ren);
                for (a, _) in env {
                    ren.get_mut(a).unwrap().pop();
                }
                Expr::Letrec(env2, Box::new(body2))
            }
        }
    }

    fn rename_free_raw(&self, m: &HashMap<Atom, Atom>, bound: &mut Vec<Atom>) -> Expr {
        match self {
            Expr::Atom(a) => {
                if bound.contains(a) {
                    Expr::Atom(*a)
                } else {
                    Expr::Atom(m.get(a).copied().unwrap_or(*a))
                }
            }
            Expr::Susp(..) => self.clone(),
            Expr::Lam(a, e) => {
                bound.push(*a);
                let body = e.rename_free_raw(m, bound);
                bound.pop();
                Expr::Lam(*a, Box::new(body))
            }
            Expr::App(f, args) => Expr::App(*f, args.iter().map(|e| e.rename_free_raw(m, bound)).collect()),
            Expr::Letrec(env, body) => {
                let n = bound.len();
                bound.extend(env.iter().map(|(a, _)| *a));
                let env2 = env.iter().map(|(a, e)| (*a, e.rename_free_raw(m, bound))).collect();
                let body2 = body.rename_free_raw(m, bound);
                bound.truncate(n);
                Expr::Letrec(env2, Box::new(body2))
            }
        }
    }

    /// Function symbols with their arities.
    pub fn signature(&self, out: &mut BTreeMap<Fun, usize>) {
        match self {
            Expr::Atom(_) | Expr::Susp(..) => {}
            Expr::Lam(_, e) => e.signature(out),
            Expr::App(f, args) => {
                out.entry(*f).or_insert(args.len());
                args.iter().for_each(|e| e.signature(out))
            }
            Expr::Letrec(env, body) => {
                env.iter().for_each(|(_, e)| e.signature(out));
                body.signature(out)
            }
        }
    }

    /// True when no letrec inside has a non-empty garbage part.
    pub fn is_garbage_free(&self) -> bool {
        match self {
            Expr::Atom(_) | Expr::Susp(..) => true,
            Expr::Lam(_, e) => e.is_garbage_free(),
            Expr::App(_, args) => args.iter().all(Expr::is_garbage_free),
            Expr::Letrec(env, body) => {
                garbage_split(env, body).0.is_empty() && env.iter().all(|(_, e)| e.is_garbage_free()) && body.is_garbage_free()
            }
        }
    }

    /// Removes every garbage binding, innermost first.
    pub fn collect_garbage(&self) -> Expr {
        match self {
            Expr::Atom(_) | Expr::Susp(..) => self.clone(),
            Expr::Lam(a, e) => Expr::Lam(*a, Box::new(e.collect_garbage())),
            Expr::App(f, args) => Expr::App(*f, args.iter().map(Expr::collect_garbage).collect()),
            Expr::Letrec(env, body) => {
                let env: Vec<(Atom, Expr)> = env.iter().map(|(a, e)| (*a, e.collect_garbage())).collect();
                let body = body.collect_garbage();
                let (_, keep) = garbage_split(&env, &body);
                if keep.is_empty() {
                    body
                } else {
                    Expr::Letrec(keep, Box::new(body))
                }
            }
        }
    }
}

/// Splits an environment into its maximal garbage part and the rest.
///
/// The rest is the closure of the bindings reachable from the free atoms of
/// the body through the free atoms of right-hand sides.
pub fn garbage_split(env: &[(Atom, Expr)], body: &Expr) -> (Vec<(Atom, Expr)>, Vec<(Atom, Expr)>) {
    let mut live = vec![false; env.len()];
    let mut todo: Vec<Atom> = body.free_atoms().into_iter().collect();
    while let Some(a) = todo.pop() {
        if let Some(i) = env.iter().position(|(b, _)| *b == a) {
            if !live[i] {
                live[i] = true;
                todo.extend(env[i].1.free_atoms());
            }
        }
    }
    let mut garbage = Vec::new();
    let mut keep = Vec::new();
    for (bind, l) in env.iter().zip(live) {
        if l {
            keep.push(bind.clone());
        } else {
            garbage.push(bind.clone());
        }
    }
    (garbage, keep)
}

/// Shape class used to prune binding correspondences: atoms are one class,
/// everything else is keyed by its top symbol.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Top {
    Atom,
    Lam,
    App(Fun, usize),
    Letrec(usize),
}

pub fn top(e: &Expr) -> Option<Top> {
    match e {
        Expr::Atom(_) => Some(Top::Atom),
        Expr::Susp(..) => None,
        Expr::Lam(..) => Some(Top::Lam),
        Expr::App(f, args) => Some(Top::App(*f, args.len())),
        Expr::Letrec(env, _) => Some(Top::Letrec(env.len())),
    }
}

/// The permutation used when matching `letrec a_i.. ` against
/// `letrec b_i..` under the binding correspondence `rho`: it sends
/// `b_rho(i)` to `a_i`, and the remaining atoms of `{a} \ {b}` to the
/// remaining atoms of `{b} \ {a}` in ascending order.
pub fn binder_perm(a: &[Atom], b: &[Atom], rho: &[usize]) -> Perm {
    let mut pairs: Vec<(Atom, Atom)> = rho.iter().enumerate().map(|(i, &j)| (b[j], a[i])).collect();
    let a_set: BTreeSet<Atom> = a.iter().copied().collect();
    let b_set: BTreeSet<Atom> = b.iter().copied().collect();
    let left: Vec<Atom> = a_set.difference(&b_set).copied().collect();
    let right: Vec<Atom> = b_set.difference(&a_set).copied().collect();
    pairs.extend(left.into_iter().zip(right));
    Perm::from_pairs(pairs).expect("binder correspondence is a bijection")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn at(s: &str) -> Atom {
        Atom::new(s)
    }

    #[test]
    fn permutation_renames_binders() {
        let p = Perm::swap(at("x"), at("y"));
        assert_eq!(e("(lam x (lam x a))").permute(&p), e("(lam y (lam y a))"));
        assert_eq!(e("(lam x (lam x a))").permute(&Perm::id()), e("(lam x (lam x a))"));
        let q = Perm::swap(at("a"), at("b"));
        assert_eq!(e("(letrec ((c a) (d b)) True)").permute(&q), e("(letrec ((c b) (d a)) True)"));
    }

    #[test]
    fn free_atoms_follow_letrec_scope() {
        let fa = |s: &str| e(s).free_atoms().into_iter().map(|a| a.name()).collect::<Vec<_>>();
        assert_eq!(fa("(letrec ((c a) (d b)) True)"), vec!["a", "b"]);
        assert!(fa("(lam a a)").is_empty());
        assert_eq!(fa("(letrec ((a b) (b c)) b)"), vec!["c"]);
        assert_eq!(e("(letrec ((a b) (b c)) b)").bound_atoms(), [at("a"), at("b")].into_iter().collect());
    }

    #[test]
    fn garbage_examples() {
        let split = |s: &str| match e(s) {
            Expr::Letrec(env, body) => garbage_split(&env, &body).0,
            _ => unreachable!(),
        };
        assert_eq!(split("(letrec ((a b) (b c)) b)"), vec![(at("a"), e("b"))]);
        assert_eq!(split("(letrec ((a d) (b 1) (c d)) (f b))"), vec![(at("a"), e("d")), (at("c"), e("d"))]);
        assert!(e("(lam a a)").is_garbage_free());
        assert!(!e("(letrec ((a b) (b c)) b)").is_garbage_free());
        assert_eq!(e("(letrec ((a b) (b c)) b)").collect_garbage(), e("(letrec ((b c)) b)"));
    }

    #[test]
    fn example_binder_permutation() {
        let p = binder_perm(&[at("a"), at("b")], &[at("b"), at("c")], &[0, 1]);
        let want = Perm::from_pairs([(at("b"), at("a")), (at("c"), at("b")), (at("a"), at("c"))]);
        assert_eq!(Some(p), want);
    }

    #[test]
    fn rename_free_avoids_capture() {
        let m: HashMap<Atom, Atom> = [(at("y"), at("x"))].into_iter().collect();
        let r = e("(lam x (f x y))").rename_free(&m);
        match &r {
            Expr::Lam(b, body) => {
                assert_ne!(*b, at("x"));
                assert_eq!(**body, Expr::App(Fun::new("f"), vec![Expr::Atom(*b), Expr::Atom(at("x"))]));
            }
            _ => panic!(),
        }
    }
}
