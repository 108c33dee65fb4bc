//! Nominal unification for expressions with letrec.
//!
//! Equations are flattened first, so both sides of every equation have depth
//! at most one. Whenever one side is a suspension it is normalized to the
//! left with the identity permutation: `X ≐ e`. An equation `X ≐ σ·X` is a
//! fixpoint equation; settled fixpoints are kept per variable.

use crate::alpha::{BudgetExceeded, Mode};
use crate::freshness::{simplify_one, Atomic};
use crate::name::{Atom, Fun, Var, VarSupply};
use crate::perm::Perm;
use crate::permgroup::Chain;
use crate::term::{binder_perm, top, Expr, Top};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub type Eq = (Expr, Expr);

/// Splits nested expressions until every equation side has depth at most
/// one. Atoms and suspensions stay in place; every other argument is
/// replaced by a fresh variable with its own equation.
pub fn flatten(eqs: &[Eq], supply: &mut VarSupply) -> Vec<Eq> {
    let mut out = Vec::new();
    for (l, r) in eqs {
        let mut subs = Vec::new();
        let l = flatten_side(l, supply, &mut subs);
        let r = flatten_side(r, supply, &mut subs);
        out.push((l, r));
        out.extend(subs);
    }
    out
}

fn flatten_side(e: &Expr, supply: &mut VarSupply, out: &mut Vec<Eq>) -> Expr {
    let mut child = |c: &Expr, out: &mut Vec<Eq>| -> Expr {
        match c {
            Expr::Atom(_) | Expr::Susp(..) => c.clone(),
            _ => {
                let x = supply.fresh();
                let at = out.len();
                let flat = flatten_side(c, supply, out);
                out.insert(at, (Expr::var(x), flat));
                Expr::var(x)
            }
        }
    };
    match e {
        Expr::Atom(_) | Expr::Susp(..) => e.clone(),
        Expr::Lam(a, b) => Expr::Lam(*a, Box::new(child(b, out))),
        Expr::App(f, args) => Expr::App(*f, args.iter().map(|a| child(a, out)).collect()),
        Expr::Letrec(env, body) => {
            let env = env.iter().map(|(a, s)| (*a, child(s, out))).collect();
            Expr::Letrec(env, Box::new(child(body, out)))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    pub elim_fp: bool,
    pub garbage_free: bool,
    pub budget: u64,
    pub jobs: usize,
    /// Record the termination measure after every rule application.
    pub trace: bool,
}

impl Default for Config {
    fn default() -> Config {
        Config { mode: Mode::Decision, elim_fp: true, garbage_free: false, budget: 1_000_000, jobs: 1, trace: false }
    }
}

/// `(θ, ∇', FIX)`. `theta` is applied in order: later assignments may
/// instantiate variables used by earlier ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Unifier {
    pub theta: Vec<(Var, Expr)>,
    pub nabla: Atomic,
    /// `X ≐ σ·X`
    pub fix: Vec<(Var, Perm)>,
}

impl Unifier {
    pub fn trivial() -> Unifier {
        Unifier { theta: Vec::new(), nabla: Atomic::new(), fix: Vec::new() }
    }

    /// The substitution represented by the assignment chain.
    pub fn substitution(&self) -> BTreeMap<Var, Expr> {
        let mut out: BTreeMap<Var, Expr> = BTreeMap::new();
        for (x, e) in self.theta.iter().rev() {
            let e = e.subst_map(&out);
            out.insert(*x, e);
        }
        out
    }

    /// The instance obtained by sending every unassigned variable to `a`.
    pub fn ground_with(&self, vars: &BTreeSet<Var>, a: Atom) -> BTreeMap<Var, Expr> {
        let sub = self.substitution();
        let mut rest: BTreeMap<Var, Expr> = BTreeMap::new();
        let mut all: BTreeSet<Var> = vars.clone();
        for e in sub.values() {
            e.collect_vars(&mut all);
        }
        all.extend(self.nabla.iter().map(|(_, x)| *x));
        all.extend(self.fix.iter().map(|(x, _)| *x));
        for x in all {
            if !sub.contains_key(&x) {
                rest.insert(x, Expr::Atom(a));
            }
        }
        vars.iter().map(|x| (*x, sub.get(x).map_or_else(|| Expr::Atom(a), |e| e.subst_map(&rest)))).collect()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (_, e) in &self.theta {
            e.collect_atoms(&mut out);
        }
        out.extend(self.nabla.iter().map(|(a, _)| *a));
        for (_, p) in &self.fix {
            out.extend(p.domain_iter());
        }
        out
    }
}

impl fmt::Display for Unifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(unifier (theta")?;
        for (x, e) in &self.theta {
            write!(f, " ({x} {e})")?;
        }
        write!(f, ") (freshness")?;
        for (a, x) in &self.nabla {
            write!(f, " ({a} {x})")?;
        }
        write!(f, ") (fixpoints")?;
        for (x, p) in &self.fix {
            write!(f, " ({x} {})", Expr::Susp(p.clone(), *x))?;
        }
        write!(f, "))")
    }
}

/// `(#Var, #LrλFA, #Eqs)`
pub type Measure = (usize, usize, usize);

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub rules: BTreeMap<&'static str, u64>,
    pub failures: BTreeMap<&'static str, u64>,
    /// Rule applications over all branches.
    pub states: u64,
    /// Largest number of rule applications along one branch.
    pub max_branch_steps: u64,
    /// Largest number of settled fixpoint equations for one variable.
    pub max_fixpoints: usize,
    /// Steps that did not decrease the measure, by rule.
    pub measure_violations: BTreeMap<&'static str, u64>,
    /// Steps that did not decrease the measure with atoms left out of `#LrλFA`.
    pub core_violations: u64,
    /// Size of the flattened input, not counting permutations.
    pub size: usize,
    pub size_with_perms: usize,
    /// Measure after each step on the branch of the first result.
    pub trace: Vec<Measure>,
}

impl Stats {
    fn merge(&mut self, o: Stats) {
        for (k, v) in o.rules {
            *self.rules.entry(k).or_default() += v;
        }
        for (k, v) in o.failures {
            *self.failures.entry(k).or_default() += v;
        }
        self.states += o.states;
        self.max_branch_steps = self.max_branch_steps.max(o.max_branch_steps);
        self.max_fixpoints = self.max_fixpoints.max(o.max_fixpoints);
        for (k, v) in o.measure_violations {
            *self.measure_violations.entry(k).or_default() += v;
        }
        self.core_violations += o.core_violations;
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(stats (size {}) (size-with-perms {}) (states {}) (max-branch-steps {}) (max-fixpoints {}) (core-violations {}) (measure-violations",
            self.size, self.size_with_perms, self.states, self.max_branch_steps, self.max_fixpoints, self.core_violations)?;
        for (k, v) in &self.measure_violations {
            write!(f, " ({k} {v})")?;
        }
        write!(f, ") (rules")?;
        for (k, v) in &self.rules {
            write!(f, " ({k} {v})")?;
        }
        write!(f, ") (failures")?;
        for (k, v) in &self.failures {
            write!(f, " ({k} {v})")?;
        }
        write!(f, ") (trace")?;
        for (a, b, c) in &self.trace {
            write!(f, " ({a} {b} {c})")?;
        }
        write!(f, "))")
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub unifiers: Vec<Unifier>,
    pub stats: Stats,
}

#[derive(Clone, Debug)]
struct St {
    eqs: Vec<Eq>,
    fix: BTreeMap<Var, Vec<Perm>>,
    nabla: Atomic,
    theta: Vec<(Var, Expr)>,
    steps: u64,
    path: Vec<u32>,
    trace: Vec<Measure>,
    core: Option<Measure>,
}

enum Step {
    Next,
    Branch(Vec<St>),
    Fail(&'static str),
    Done(Unifier),
}

fn normalize(l: Expr, r: Expr) -> Eq {
    match (&l, &r) {
        (Expr::Susp(p, x), _) => {
            let x = *x;
            let inv = p.inverse();
            (Expr::var(x), r.permute(&inv))
        }
        (_, Expr::Susp(p, x)) => {
            let x = *x;
            let inv = p.inverse();
            (Expr::var(x), l.permute(&inv))
        }
        _ => (l, r),
    }
}

fn lhs_var(eq: &Eq) -> Option<Var> {
    match &eq.0 {
        Expr::Susp(_, x) => Some(*x),
        _ => None,
    }
}

/// Letrec, lambda, function symbols and atoms outside permutations.
fn symbols(e: &Expr) -> usize {
    match e {
        Expr::Atom(_) => 1,
        Expr::Susp(..) => 0,
        Expr::Lam(_, b) => 2 + symbols(b),
        Expr::App(_, args) => 1 + args.iter().map(symbols).sum::<usize>(),
        Expr::Letrec(env, b) => 1 + env.iter().map(|(_, s)| 1 + symbols(s)).sum::<usize>() + symbols(b),
    }
}

fn atom_leaves(e: &Expr) -> usize {
    match e {
        Expr::Atom(_) => 1,
        Expr::Susp(..) => 0,
        Expr::Lam(_, b) => atom_leaves(b),
        Expr::App(_, args) => args.iter().map(atom_leaves).sum(),
        Expr::Letrec(env, b) => env.iter().map(|(_, s)| atom_leaves(s)).sum::<usize>() + atom_leaves(b),
    }
}

impl St {
    /// The measure, and the same measure with atoms not counted as symbols.
    fn measures(&self) -> (Measure, Measure) {
        let mut vars = BTreeSet::new();
        let mut syms = 0;
        let mut atoms = 0;
        for (l, r) in &self.eqs {
            l.collect_vars(&mut vars);
            r.collect_vars(&mut vars);
            syms += symbols(l) + symbols(r);
            atoms += atom_leaves(l) + atom_leaves(r);
        }
        let mut n = self.eqs.len();
        for (x, ps) in &self.fix {
            if !ps.is_empty() {
                vars.insert(*x);
                n += ps.len();
            }
        }
        let v = vars.len();
        ((v, syms, n), (v, syms - atoms, n))
    }

    fn push_eq(&mut self, l: Expr, r: Expr) {
        let (l, r) = normalize(l, r);
        if l != r {
            self.eqs.push((l, r));
        }
    }

    fn add_fresh(&mut self, a: Atom, e: &Expr) -> bool {
        simplify_one(a, e, &mut self.nabla)
    }

    /// Moves every `a # X` into `a # e`.
    fn subst_nabla(&mut self, x: Var, e: &Expr) -> bool {
        let hit: Vec<(Atom, Var)> = self.nabla.iter().filter(|(_, y)| *y == x).copied().collect();
        for c in &hit {
            self.nabla.remove(c);
        }
        hit.into_iter().all(|(a, _)| simplify_one(a, e, &mut self.nabla))
    }

    fn fixpoint_count(&self) -> usize {
        self.fix.values().map(Vec::len).max().unwrap_or(0)
    }
}

fn same_class(a: Option<Top>, b: Option<Top>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

struct Engine<'c> {
    cfg: &'c Config,
    stats: Stats,
    found: Vec<(Vec<u32>, Unifier, Vec<Measure>)>,
}

enum Stop {
    Done,
    Budget,
}

impl Engine<'_> {
    fn rule(&mut self, st: &mut St, name: &'static str) {
        *self.stats.rules.entry(name).or_default() += 1;
        self.note(st, name);
    }

    fn note(&mut self, st: &mut St, name: &'static str) {
        st.steps += 1;
        self.stats.max_branch_steps = self.stats.max_branch_steps.max(st.steps);
        if self.cfg.trace {
            let (m, core) = st.measures();
            if st.trace.last().is_some_and(|prev| m >= *prev) {
                *self.stats.measure_violations.entry(name).or_default() += 1;
            }
            if st.core.is_some_and(|prev| core >= prev) {
                self.stats.core_violations += 1;
            }
            st.trace.push(m);
            st.core = Some(core);
        }
    }

    fn classes(st: &St) -> HashMap<Var, Top> {
        let mut out = HashMap::new();
        for (l, r) in &st.eqs {
            if let (Some(x), Some(t)) = (lhs_var(&(l.clone(), r.clone())), top(r)) {
                out.entry(x).or_insert(t);
            }
        }
        out
    }

    fn class_of(classes: &HashMap<Var, Top>, e: &Expr) -> Option<Top> {
        match e {
            Expr::Susp(_, x) => classes.get(x).copied(),
            _ => top(e),
        }
    }

    /// One level of decomposition of two non-suspensions.
    fn decompose(&mut self, st: &mut St, s: Expr, t: Expr) -> Result<(&'static str, Option<Vec<St>>), &'static str> {
        match (s, t) {
            (Expr::App(f, ss), Expr::App(g, ts)) if f == g && ss.len() == ts.len() => {
                for (a, b) in ss.into_iter().zip(ts) {
                    st.push_eq(a, b);
                }
                Ok(("3", None))
            }
            (Expr::Lam(a, s), Expr::Lam(b, t)) if a == b => {
                st.push_eq(*s, *t);
                Ok(("4", None))
            }
            (Expr::Lam(a, s), Expr::Lam(b, t)) => {
                if !st.add_fresh(a, &t) {
                    return Err("FailF");
                }
                st.push_eq(*s, t.permute(&Perm::swap(a, b)));
                Ok(("5", None))
            }
            (Expr::Letrec(env1, r1), Expr::Letrec(env2, r2)) if env1.len() == env2.len() => {
                let t = Expr::Letrec(env2.clone(), r2.clone());
                let a: Vec<Atom> = env1.iter().map(|(a, _)| *a).collect();
                let b: Vec<Atom> = env2.iter().map(|(b, _)| *b).collect();
                let classes = Self::classes(st);
                let c1: Vec<Option<Top>> = env1.iter().map(|(_, s)| Self::class_of(&classes, s)).collect();
                let c2: Vec<Option<Top>> = env2.iter().map(|(_, s)| Self::class_of(&classes, s)).collect();
                if !same_class(Self::class_of(&classes, &r1), Self::class_of(&classes, &r2)) {
                    return Err("Clash");
                }
                let mut rhos = Vec::new();
                perms_filtered(a.len(), &|i, j| same_class(c1[i], c2[j]), &mut Vec::new(), &mut rhos);
                let mut out = Vec::new();
                for rho in rhos {
                    let pi = binder_perm(&a, &b, &rho);
                    let mut child = st.clone();
                    let ok = a.iter().all(|ai| child.add_fresh(*ai, &t));
                    if !ok {
                        *self.stats.failures.entry("FailF").or_default() += 1;
                        continue;
                    }
                    for (i, j) in rho.iter().enumerate() {
                        child.push_eq(env1[i].1.clone(), env2[*j].1.permute(&pi));
                    }
                    child.push_eq((*r1).clone(), r2.permute(&pi));
                    out.push(child);
                }
                Ok(("6", Some(out)))
            }
            (s, t) if s == t => Ok(("1", None)),
            _ => Err("Clash"),
        }
    }

    fn after(&mut self, st: &mut St, name: Option<&'static str>, d: Result<(&'static str, Option<Vec<St>>), &'static str>) -> Step {
        match d {
            Err(e) => Step::Fail(e),
            Ok((rule, None)) => {
                self.rule(st, name.unwrap_or(rule));
                Step::Next
            }
            Ok((rule, Some(mut branches))) => {
                let name = name.unwrap_or(rule);
                *self.stats.rules.entry(name).or_default() += 1;
                for b in &mut branches {
                    self.note(b, name);
                }
                Step::Branch(branches)
            }
        }
    }

    fn step(&mut self, st: &mut St) -> Step {
        // (1)
        if let Some(i) = st.eqs.iter().position(|(l, r)| l == r) {
            st.eqs.remove(i);
            self.rule(st, "1");
            return Step::Next;
        }
        // (Clash), checked eagerly
        for (l, r) in &st.eqs {
            if !l.is_susp() && !r.is_susp() && top(l) != top(r) {
                return Step::Fail("Clash");
            }
            if let (Expr::Atom(a), Expr::Atom(b)) = (l, r) {
                if a != b {
                    return Step::Fail("Clash");
                }
            }
        }
        // (2)
        let var_var = st.eqs.iter().position(|(l, r)| match (l, r) {
            (Expr::Susp(_, x), Expr::Susp(_, y)) => x != y,
            _ => false,
        });
        if let Some(i) = var_var {
            let (l, r) = st.eqs.remove(i);
            let x = lhs_var(&(l, r.clone())).unwrap();
            return match self.eliminate(st, x, r) {
                Ok(()) => {
                    self.rule(st, "2");
                    Step::Next
                }
                Err(e) => Step::Fail(e),
            };
        }
        // (3)-(6)
        if let Some(i) = st.eqs.iter().position(|(l, r)| !l.is_susp() && !r.is_susp()) {
            let (l, r) = st.eqs.remove(i);
            let d = self.decompose(st, l, r);
            return self.after(st, None, d);
        }
        // (ElimFP) / (FPS2) on pending fixpoint equations
        while let Some(i) = st.eqs.iter().position(|(l, r)| match (l, r) {
            (Expr::Susp(_, x), Expr::Susp(_, y)) => x == y,
            _ => false,
        }) {
            let (l, r) = st.eqs.remove(i);
            let x = lhs_var(&(l, r.clone())).unwrap();
            let Expr::Susp(sigma, _) = r else { unreachable!() };
            if self.cfg.garbage_free {
                for a in sigma.domain_iter() {
                    st.nabla.insert((a, x));
                }
                self.rule(st, "FPS2");
                return Step::Next;
            }
            let settled = st.fix.entry(x).or_default();
            let redundant = if self.cfg.elim_fp { Chain::new(settled).contains(&sigma) } else { settled.contains(&sigma) };
            if redundant {
                self.rule(st, "ElimFP");
                return Step::Next;
            }
            settled.push(sigma);
            self.stats.max_fixpoints = self.stats.max_fixpoints.max(st.fixpoint_count());
        }
        // (MMS)
        let mut first: HashMap<Var, usize> = HashMap::new();
        let mut mms = None;
        for (i, eq) in st.eqs.iter().enumerate() {
            let x = lhs_var(eq).expect("only defining equations are left");
            if let Some(&j) = first.get(&x) {
                mms = Some((j, i));
                break;
            }
            first.insert(x, i);
        }
        if let Some((j, i)) = mms {
            let (_, e2) = st.eqs.remove(i);
            let e1 = st.eqs[j].1.clone();
            let d = self.decompose(st, e1, e2);
            return self.after(st, Some("MMS"), d);
        }
        // (FPS) / (ElimX)
        if st.eqs.is_empty() {
            let fix = st.fix.iter().flat_map(|(x, ps)| ps.iter().map(move |p| (*x, p.clone()))).collect();
            return Step::Done(Unifier { theta: st.theta.clone(), nabla: st.nabla.clone(), fix });
        }
        let source = (0..st.eqs.len()).find(|&i| {
            let x = lhs_var(&st.eqs[i]).unwrap();
            st.eqs.iter().all(|(_, r)| !r.has_var(x))
        });
        let Some(i) = source else { return Step::Fail("Cycle") };
        let (l, e) = st.eqs.remove(i);
        let x = lhs_var(&(l, e.clone())).unwrap();
        let fps = if self.cfg.garbage_free { "ElimX" } else { "FPS" };
        if let Some(taus) = st.fix.remove(&x) {
            for tau in taus {
                st.push_eq(e.clone(), e.permute(&tau));
            }
        }
        if !st.subst_nabla(x, &e) {
            return Step::Fail("FailFS");
        }
        st.theta.push((x, e));
        self.rule(st, fps);
        Step::Next
    }

    /// Rule (2): `X ≐ σ·Y` with `X ≠ Y`.
    fn eliminate(&mut self, st: &mut St, x: Var, by: Expr) -> Result<(), &'static str> {
        let eqs = std::mem::take(&mut st.eqs);
        let rep = |e: &Expr| e.subst(&|v| (v == x).then(|| by.clone()));
        for (l, r) in eqs {
            let (l, r) = (rep(&l), rep(&r));
            let (l, r) = normalize(l, r);
            st.eqs.push((l, r));
        }
        if let Some(taus) = st.fix.remove(&x) {
            for tau in taus {
                st.push_eq(by.clone(), by.permute(&tau));
            }
        }
        if !st.subst_nabla(x, &by) {
            return Err("FailFS");
        }
        st.theta.push((x, by));
        Ok(())
    }

    fn tick(&self) -> Result<(), Stop> {
        if self.stats.states >= self.cfg.budget {
            Err(Stop::Budget)
        } else {
            Ok(())
        }
    }

    /// Runs `st` until it fails, finishes or branches.
    fn advance(&mut self, st: &mut St) -> Result<Option<Vec<St>>, Stop> {
        loop {
            self.tick()?;
            self.stats.states += 1;
            match self.step(st) {
                Step::Next => {}
                Step::Branch(children) => return Ok(Some(children)),
                Step::Fail(why) => {
                    *self.stats.failures.entry(why).or_default() += 1;
                    return Ok(None);
                }
                Step::Done(u) => {
                    self.found.push((st.path.clone(), u, st.trace.clone()));
                    return match self.cfg.mode {
                        Mode::Decision => Err(Stop::Done),
                        Mode::Collecting => Ok(None),
                    };
                }
            }
        }
    }

    fn dfs(&mut self, mut st: St) -> Result<(), Stop> {
        if let Some(children) = self.advance(&mut st)? {
            for (i, mut c) in children.into_iter().enumerate() {
                c.path.push(i as u32);
                self.dfs(c)?;
            }
        }
        Ok(())
    }
}

fn perms_filtered(n: usize, ok: &dyn Fn(usize, usize) -> bool, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if acc.len() == n {
        out.push(acc.clone());
        return;
    }
    let i = acc.len();
    for j in 0..n {
        if !acc.contains(&j) && ok(i, j) {
            acc.push(j);
            perms_filtered(n, ok, acc, out);
            acc.pop();
        }
    }
}

/// `{X_n ≐ π·X_n} ∪ {X_i ≐ (f X_{i-1} ρ_i·X_{i-1}) | 2 ≤ i ≤ n}` with
/// `π = (x2 y2)..(xn yn)` and `ρ_i = (x_i z_i)`. Without ElimFP, solving it
/// leaves `2^(n-1)` distinct fixpoint equations on `X1`.
pub fn fixpoint_family(n: usize) -> Vec<Eq> {
    let at = |p: &str, i: usize| Atom::new(&format!("{p}{i}"));
    let x = |i: usize| Var::new(&format!("X{i}"));
    let pi = Perm::from_swaps((2..=n).map(|i| (at("x", i), at("y", i))));
    let mut eqs = vec![(Expr::var(x(n)), Expr::Susp(pi, x(n)))];
    for i in 2..=n {
        let rho = Perm::swap(at("x", i), at("z", i));
        eqs.push((Expr::var(x(i)), Expr::App(Fun::new("f"), vec![Expr::var(x(i - 1)), Expr::Susp(rho, x(i - 1))])));
    }
    eqs
}

/// Size of a problem: nodes of all equation sides, permutations not counted.
pub fn problem_size(eqs: &[Eq]) -> usize {
    eqs.iter().map(|(l, r)| l.size() + r.size()).sum()
}

/// Runs the unification algorithm on `eqs` under the freshness constraints
/// `fresh`.
pub fn letrec_unify(eqs: &[Eq], fresh: &[(Atom, Expr)], cfg: &Config) -> Result<Outcome, BudgetExceeded> {
    let mut vars = BTreeSet::new();
    for (l, r) in eqs {
        l.collect_vars(&mut vars);
        r.collect_vars(&mut vars);
    }
    for (_, e) in fresh {
        e.collect_vars(&mut vars);
    }
    let mut supply = VarSupply::avoiding(&vars);
    let flat = flatten(eqs, &mut supply);
    let mut stats = Stats {
        size: problem_size(&flat),
        size_with_perms: flat.iter().map(|(l, r)| l.size_with_perms() + r.size_with_perms()).sum(),
        ..Stats::default()
    };
    let mut root = St {
        eqs: Vec::new(),
        fix: BTreeMap::new(),
        nabla: Atomic::new(),
        theta: Vec::new(),
        steps: 0,
        path: Vec::new(),
        trace: Vec::new(),
        core: None,
    };
    for (l, r) in flat {
        root.push_eq(l, r);
    }
    if cfg.trace {
        let (m, core) = root.measures();
        root.trace.push(m);
        root.core = Some(core);
    }
    for (a, e) in fresh {
        if !root.add_fresh(*a, e) {
            *stats.failures.entry("FailF").or_default() += 1;
            return Ok(Outcome { unifiers: Vec::new(), stats });
        }
    }
    let found = if cfg.jobs > 1 {
        run_parallel(root, cfg, &mut stats)?
    } else {
        let mut eng = Engine { cfg, stats: Stats::default(), found: Vec::new() };
        let r = eng.dfs(root);
        stats.merge(std::mem::take(&mut eng.stats));
        if let Err(Stop::Budget) = r {
            return Err(BudgetExceeded(cfg.budget));
        }
        eng.found
    };
    Ok(finish(found, cfg, stats))
}

fn finish(mut found: Vec<(Vec<u32>, Unifier, Vec<Measure>)>, cfg: &Config, mut stats: Stats) -> Outcome {
    found.sort_by(|a, b| a.0.cmp(&b.0));
    if cfg.mode == Mode::Decision {
        found.truncate(1);
    }
    if let Some((_, _, trace)) = found.first() {
        stats.trace = trace.clone();
    }
    let mut unifiers: Vec<Unifier> = Vec::new();
    for (_, u, _) in found {
        if !unifiers.contains(&u) {
            unifiers.push(u);
        }
    }
    Outcome { unifiers, stats }
}

fn run_parallel(root: St, cfg: &Config, stats: &mut Stats) -> Result<Vec<(Vec<u32>, Unifier, Vec<Measure>)>, BudgetExceeded> {
    let mut eng = Engine { cfg, stats: Stats::default(), found: Vec::new() };
    let mut frontier = std::collections::VecDeque::from([root]);
    let want = cfg.jobs * 4;
    while !frontier.is_empty() && frontier.len() < want {
        let mut st = frontier.pop_front().unwrap();
        match eng.advance(&mut st) {
            Err(Stop::Budget) => return Err(BudgetExceeded(cfg.budget)),
            Err(Stop::Done) => {
                frontier.clear();
                break;
            }
            Ok(Some(children)) => {
                for (i, mut c) in children.into_iter().enumerate() {
                    c.path.push(i as u32);
                    frontier.push_back(c);
                }
            }
            Ok(None) => {}
        }
    }
    let mut found = std::mem::take(&mut eng.found);
    stats.merge(std::mem::take(&mut eng.stats));
    let mut chunks: Vec<Vec<St>> = vec![Vec::new(); cfg.jobs];
    for (i, st) in frontier.into_iter().enumerate() {
        chunks[i % cfg.jobs].push(st);
    }
    let per_job = Config { budget: cfg.budget.saturating_sub(stats.states), ..cfg.clone() };
    let results: Vec<(Stats, Vec<_>, bool)> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                let per_job = &per_job;
                s.spawn(move || {
                    let mut eng = Engine { cfg: per_job, stats: Stats::default(), found: Vec::new() };
                    let mut over = false;
                    for st in chunk {
                        match eng.dfs(st) {
                            Err(Stop::Budget) => {
                                over = true;
                                break;
                            }
                            Err(Stop::Done) => break,
                            Ok(()) => {}
                        }
                    }
                    (eng.stats, eng.found, over)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut over = false;
    for (s, f, o) in results {
        stats.merge(s);
        found.extend(f);
        over |= o;
    }
    if over || stats.states > cfg.budget {
        return Err(BudgetExceeded(cfg.budget));
    }
    Ok(found)
}
