//! Unification with atom variables, guided by a fixpoint-count threshold.

use super::constraint::{av_satisfiable, simplify_all, simplify_av, AFresh, Shown};
use super::expr::AExpr;
use super::grammar::{Assign, Grammar, Nt};
use crate::alpha::{BudgetExceeded, Mode};
use crate::name::{Atom, AtomSupply, AtomVar, Fun, Var};
use crate::perm::Perm;
use crate::permgroup::Chain;
use crate::syntax::{SPerm, Term, TierError, W};
use crate::term::Top;
use crate::unify::{letrec_unify, Config};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// The threshold `p` on fixpoint equations per variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    NLogN,
    Quadratic,
    Constant(u64),
}

impl Strategy {
    /// `p(s)`, capped at `s²`.
    pub fn threshold(&self, s: usize) -> f64 {
        let x = s as f64;
        let p = match self {
            Strategy::NLogN => x * (x + 2.0).log2(),
            Strategy::Quadratic => x * x,
            Strategy::Constant(k) => *k as f64,
        };
        p.min(x * x)
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Strategy, String> {
        match s {
            "nlogn" => Ok(Strategy::NLogN),
            "quadratic" => Ok(Strategy::Quadratic),
            _ => s
                .strip_prefix("constant:")
                .and_then(|k| k.parse().ok())
                .map(Strategy::Constant)
                .ok_or_else(|| format!("unknown strategy `{s}` (nlogn, quadratic, constant:K)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AvConfig {
    pub mode: Mode,
    pub strategy: Strategy,
    pub budget: u64,
}

impl Default for AvConfig {
    fn default() -> AvConfig {
        AvConfig { mode: Mode::Decision, strategy: Strategy::NLogN, budget: 1_000_000 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AvError {
    #[error(transparent)]
    Input(#[from] TierError),
    #[error("budget of {0} states exceeded")]
    Budget(u64),
}

impl From<BudgetExceeded> for AvError {
    fn from(b: BudgetExceeded) -> AvError {
        AvError::Budget(b.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvUnifier {
    pub theta: Vec<(Var, Term)>,
    /// Atom variables instantiated during the run.
    pub atoms: Vec<(AtomVar, Atom)>,
    pub nabla: Vec<Shown>,
    pub fix: Vec<(Var, SPerm)>,
    /// A satisfying instantiation of all atom variables.
    pub witness: Assign,
}

impl fmt::Display for AvUnifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(unifier (theta")?;
        for (x, e) in &self.theta {
            write!(f, " ({x} {e})")?;
        }
        write!(f, ") (atoms")?;
        for (a, b) in &self.atoms {
            write!(f, " ({a} {b})")?;
        }
        write!(f, ") (freshness")?;
        for c in &self.nabla {
            write!(f, " {c}")?;
        }
        write!(f, ") (fixpoints")?;
        for (x, p) in &self.fix {
            write!(f, " ({x} {})", Term::Susp(p.clone(), *x))?;
        }
        write!(f, ") (witness")?;
        for (a, b) in &self.witness {
            write!(f, " ({a} {b})")?;
        }
        write!(f, "))")
    }
}

#[derive(Clone, Debug, Default)]
pub struct AvStats {
    pub rules: BTreeMap<&'static str, u64>,
    pub failures: BTreeMap<&'static str, u64>,
    pub states: u64,
    pub max_branch_steps: u64,
    pub max_fixpoints: usize,
    /// Largest per-variable fixpoint count right after an ElimAB step.
    pub max_fixpoints_after_elimab: usize,
    /// ElimAB steps after which some count still exceeded the threshold.
    pub elimab_over_bound: u64,
    pub stuck: u64,
    pub size: usize,
    pub threshold: f64,
}

impl fmt::Display for AvStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(stats (size {}) (threshold {:.2}) (states {}) (max-branch-steps {}) (max-fixpoints {}) (max-fixpoints-after-elimab {}) (elimab-over-bound {}) (stuck {}) (rules",
            self.size, self.threshold, self.states, self.max_branch_steps, self.max_fixpoints,
            self.max_fixpoints_after_elimab, self.elimab_over_bound, self.stuck
        )?;
        for (k, v) in &self.rules {
            write!(f, " ({k} {v})")?;
        }
        write!(f, ") (failures")?;
        for (k, v) in &self.failures {
            write!(f, " ({k} {v})")?;
        }
        write!(f, "))")
    }
}

#[derive(Clone, Debug, Default)]
pub struct AvOutcome {
    pub unifiers: Vec<AvUnifier>,
    pub stats: AvStats,
}

type Eq = (AExpr, AExpr);

#[derive(Clone, Debug)]
struct St {
    g: Grammar,
    eqs: Vec<Eq>,
    fix: BTreeMap<Var, Vec<Nt>>,
    nabla: Vec<AFresh>,
    theta: Vec<(Var, AExpr)>,
    assign: Assign,
    elim: Vec<(AtomVar, Atom)>,
    steps: u64,
}

enum Step {
    Next,
    Branch(Vec<St>),
    Fail(&'static str),
    Done(Box<AvUnifier>),
}

fn tuple(n: usize) -> Fun {
    Fun::new(&format!("tuple#{n}"))
}

impl St {
    fn normalize(&mut self, l: AExpr, r: AExpr) -> Eq {
        match (&l, &r) {
            (AExpr::Susp(p, x), _) => {
                let (p, x) = (*p, *x);
                let inv = self.g.inverse(p);
                (AExpr::var(x), r.permute(inv, &mut self.g))
            }
            (_, AExpr::Susp(p, x)) => {
                let (p, x) = (*p, *x);
                let inv = self.g.inverse(p);
                (AExpr::var(x), l.permute(inv, &mut self.g))
            }
            (AExpr::Name(_), _) => (l, r),
            (_, AExpr::Name(_)) => (r, l),
            _ => (l, r),
        }
    }

    fn push_eq(&mut self, l: AExpr, r: AExpr) {
        let (l, r) = self.normalize(l, r);
        if l != r {
            self.eqs.push((l, r));
        }
    }

    fn add_fresh(&mut self, c: AFresh) -> bool {
        simplify_av(&c, &self.g, &self.assign, &mut self.nabla)
    }

    fn resimplify(&mut self) -> bool {
        match simplify_all(&self.nabla, &self.g, &self.assign) {
            Some(n) => {
                self.nabla = n;
                true
            }
            None => false,
        }
    }

    fn subst_nabla(&mut self, x: Var, by: &AExpr) -> bool {
        let old = std::mem::take(&mut self.nabla);
        for c in old {
            let c = match c {
                AFresh::Fresh(w, e) if e.has_var(x) => AFresh::Fresh(w, e.subst(x, by, &mut self.g)),
                c => c,
            };
            self.nabla.push(c);
        }
        self.resimplify()
    }

    fn atoms(&self) -> BTreeSet<Atom> {
        let mut atoms = BTreeSet::new();
        let mut avars = BTreeSet::new();
        for (l, r) in &self.eqs {
            l.collect_names(&self.g, &mut atoms, &mut avars);
            r.collect_names(&self.g, &mut atoms, &mut avars);
        }
        for (_, e) in &self.theta {
            e.collect_names(&self.g, &mut atoms, &mut avars);
        }
        for c in &self.nabla {
            match c {
                AFresh::Fresh(w, e) => {
                    AExpr::Name(*w).collect_names(&self.g, &mut atoms, &mut avars);
                    e.collect_names(&self.g, &mut atoms, &mut avars);
                }
                AFresh::Same(a, b) => {
                    AExpr::Name(*a).collect_names(&self.g, &mut atoms, &mut avars);
                    AExpr::Name(*b).collect_names(&self.g, &mut atoms, &mut avars);
                }
            }
        }
        for ps in self.fix.values() {
            for p in ps {
                self.g.collect_atoms(*p, &mut atoms);
            }
        }
        atoms.extend(self.assign.values().copied());
        atoms
    }

    /// Drops fixpoint equations whose ground permutation is generated by
    /// the ground ones kept before it.
    fn reduce_fixpoints(&mut self) -> usize {
        let mut dropped = 0;
        for ps in self.fix.values_mut() {
            let mut kept: Vec<Nt> = Vec::new();
            let mut ground: Vec<Perm> = Vec::new();
            for &p in ps.iter() {
                match self.g.eval(p, &self.assign) {
                    Some(v) if Chain::new(&ground).contains(&v) => dropped += 1,
                    Some(v) => {
                        ground.push(v);
                        kept.push(p);
                    }
                    None => kept.push(p),
                }
            }
            *ps = kept;
        }
        dropped
    }

    fn max_fix(&self) -> usize {
        self.fix.values().map(Vec::len).max().unwrap_or(0)
    }

    fn output(&self, witness: Assign) -> AvUnifier {
        let theta = self.theta.iter().map(|(x, e)| (*x, e.to_term(&self.g, &self.assign))).collect();
        let nabla = self.nabla.iter().map(|c| c.show(&self.g, &self.assign)).collect();
        let fix =
            self.fix.iter().flat_map(|(x, ps)| ps.iter().map(move |p| (*x, *p))).map(|(x, p)| (x, self.g.show(p, &self.assign))).collect();
        AvUnifier { theta, atoms: self.elim.clone(), nabla, fix, witness }
    }
}

struct Engine<'c> {
    cfg: &'c AvConfig,
    p: f64,
    stats: AvStats,
    found: Vec<AvUnifier>,
}

enum Stop {
    Done,
    Budget,
}

fn class(classes: &HashMap<Var, Top>, e: &AExpr) -> Option<Top> {
    match e {
        AExpr::Susp(_, x) => classes.get(x).copied(),
        _ => e.top(),
    }
}

fn compatible(a: Option<Top>, b: Option<Top>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
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

impl Engine<'_> {
    fn rule(&mut self, st: &mut St, name: &'static str) {
        *self.stats.rules.entry(name).or_default() += 1;
        st.steps += 1;
        self.stats.max_branch_steps = self.stats.max_branch_steps.max(st.steps);
        self.stats.max_fixpoints = self.stats.max_fixpoints.max(st.max_fix());
    }

    fn step(&mut self, st: &mut St) -> Step {
        if let Some(i) = st.eqs.iter().position(|(l, r)| l == r) {
            st.eqs.remove(i);
            self.rule(st, "1");
            return Step::Next;
        }
        for (l, r) in &st.eqs {
            match (l, r) {
                (AExpr::Susp(..), _) | (_, AExpr::Susp(..)) | (AExpr::Name(_), AExpr::Name(_)) => {}
                (AExpr::Name(_), _) | (_, AExpr::Name(_)) => return Step::Fail("ClashA"),
                _ if l.top() != r.top() => return Step::Fail("Clash"),
                _ => {}
            }
        }
        // (2)
        if let Some(i) = st.eqs.iter().position(|e| matches!(e, (AExpr::Name(_), AExpr::Name(_)))) {
            let (AExpr::Name(a), AExpr::Name(b)) = st.eqs.remove(i) else { unreachable!() };
            if !st.add_fresh(AFresh::Same(a, b)) {
                return Step::Fail("Clashab");
            }
            self.rule(st, "2");
            return Step::Next;
        }
        // (3a), (3b)
        let elim = st.eqs.iter().position(|(l, r)| match (l, r) {
            (AExpr::Susp(_, x), AExpr::Susp(_, y)) => x != y,
            (AExpr::Susp(..), AExpr::Name(_)) => true,
            _ => false,
        });
        if let Some(i) = elim {
            let (l, by) = st.eqs.remove(i);
            let AExpr::Susp(_, x) = l else { unreachable!() };
            let name = if by.is_susp() { "3a" } else { "3b" };
            if !self.eliminate(st, x, by) {
                return Step::Fail("FailFS");
            }
            self.rule(st, name);
            return Step::Next;
        }
        // (4)-(6)
        let dec = st.eqs.iter().position(|(l, r)| matches!((l, r), (AExpr::App(..), AExpr::App(..)) | (AExpr::Lam(..), AExpr::Lam(..))));
        if let Some(i) = dec {
            let eq = st.eqs.remove(i);
            match eq {
                (AExpr::App(_, ss), AExpr::App(_, ts)) => {
                    for (s, t) in ss.into_iter().zip(ts) {
                        st.push_eq(s, t);
                    }
                    self.rule(st, "4");
                }
                (AExpr::Lam(w1, s), AExpr::Lam(w2, t)) if w1 == w2 => {
                    st.push_eq(*s, *t);
                    self.rule(st, "5");
                }
                (AExpr::Lam(w1, s), AExpr::Lam(w2, t)) => {
                    if !st.add_fresh(AFresh::Fresh(w1, AExpr::Lam(w2, t.clone()))) {
                        return Step::Fail("FailF");
                    }
                    let sw = st.g.swap(w1, w2);
                    let t = t.permute(sw, &mut st.g);
                    st.push_eq(*s, t);
                    self.rule(st, "6");
                }
                _ => unreachable!(),
            }
            return Step::Next;
        }
        // (ElimFP) on pending fixpoint equations
        while let Some(i) = st.eqs.iter().position(|(l, r)| matches!((l, r), (AExpr::Susp(_, x), AExpr::Susp(_, y)) if x == y)) {
            let (l, r) = st.eqs.remove(i);
            let (AExpr::Susp(_, x), AExpr::Susp(q, _)) = (l, r) else { unreachable!() };
            let value = st.g.eval(q, &st.assign);
            let settled = st.fix.entry(x).or_default();
            let redundant = match &value {
                Some(v) if v.is_id() => true,
                Some(v) => {
                    let ground: Vec<Perm> = settled.iter().filter_map(|p| st.g.eval(*p, &st.assign)).collect();
                    Chain::new(&ground).contains(v)
                }
                None => settled.contains(&q),
            };
            if redundant {
                self.rule(st, "ElimFP");
                return Step::Next;
            }
            settled.push(q);
            self.stats.max_fixpoints = self.stats.max_fixpoints.max(st.max_fix());
        }
        // (MMS)
        let mut first: HashMap<Var, usize> = HashMap::new();
        let mut mms = None;
        for (i, (l, _)) in st.eqs.iter().enumerate() {
            if let AExpr::Susp(_, x) = l {
                if let Some(&j) = first.get(x) {
                    mms = Some((j, i));
                    break;
                }
                first.insert(*x, i);
            }
        }
        if let Some((j, i)) = mms {
            let (_, e2) = st.eqs.remove(i);
            let e1 = st.eqs[j].1.clone();
            st.push_eq(e1, e2);
            self.rule(st, "MMS");
            return Step::Next;
        }
        // (Output)
        if st.eqs.is_empty() {
            return match av_satisfiable(&st.nabla, &st.g, &st.assign) {
                Some(w) => Step::Done(Box::new(st.output(w))),
                None => Step::Fail("Unsat"),
            };
        }
        // ElimAB(p)
        let over = st.fix.iter().find(|(_, ps)| ps.len() as f64 > self.p).map(|(x, _)| *x);
        if let Some(x) = over {
            let open: BTreeSet<AtomVar> =
                st.fix[&x].iter().flat_map(|p| st.g.avars(*p).iter().copied()).filter(|a| !st.assign.contains_key(a)).collect();
            if !open.is_empty() {
                return Step::Branch(self.elim_ab(st, open.into_iter().collect()));
            }
        }
        // (Cycle), then (FPS)
        let defining: Vec<usize> = (0..st.eqs.len()).filter(|&i| matches!(st.eqs[i].0, AExpr::Susp(..))).collect();
        if has_cycle(&st.eqs, &defining) {
            return Step::Fail("Cycle");
        }
        let source = defining.iter().copied().find(|&i| {
            let AExpr::Susp(_, x) = st.eqs[i].0 else { unreachable!() };
            st.eqs.iter().enumerate().all(|(j, (l, r))| !r.has_var(x) && (i == j || !l.has_var(x)))
        });
        if let Some(i) = source {
            let (l, e) = st.eqs.remove(i);
            let AExpr::Susp(_, x) = l else { unreachable!() };
            if let Some(taus) = st.fix.remove(&x) {
                for tau in taus {
                    let te = e.permute(tau, &mut st.g);
                    st.push_eq(e.clone(), te);
                }
            }
            if !st.subst_nabla(x, &e) {
                return Step::Fail("FailFS");
            }
            st.theta.push((x, e));
            self.rule(st, "FPS");
            return Step::Next;
        }
        // (7)
        if let Some(i) = st.eqs.iter().position(|e| matches!(e, (AExpr::Letrec(..), AExpr::Letrec(..)))) {
            let (AExpr::Letrec(env1, r1), AExpr::Letrec(env2, r2)) = st.eqs.remove(i) else { unreachable!() };
            let mut classes = HashMap::new();
            for (l, r) in &st.eqs {
                if let (AExpr::Susp(_, x), Some(t)) = (l, r.top()) {
                    classes.entry(*x).or_insert(t);
                }
            }
            if !compatible(class(&classes, &r1), class(&classes, &r2)) {
                return Step::Fail("Clash");
            }
            let c1: Vec<Option<Top>> = env1.iter().map(|(_, s)| class(&classes, s)).collect();
            let c2: Vec<Option<Top>> = env2.iter().map(|(_, s)| class(&classes, s)).collect();
            let mut rhos = Vec::new();
            perms_filtered(env1.len(), &|i, j| compatible(c1[i], c2[j]), &mut Vec::new(), &mut rhos);
            *self.stats.rules.entry("7").or_default() += 1;
            let n = env1.len();
            let mut out = Vec::new();
            for rho in rhos {
                let mut child = st.clone();
                let mut lhs_args: Vec<AExpr> = env1.iter().map(|(_, s)| s.clone()).collect();
                lhs_args.push((*r1).clone());
                let mut rhs_args: Vec<AExpr> = rho.iter().map(|&j| env2[j].1.clone()).collect();
                rhs_args.push((*r2).clone());
                let mut lhs = AExpr::App(tuple(n + 1), lhs_args);
                let mut rhs = AExpr::App(tuple(n + 1), rhs_args);
                for k in (0..n).rev() {
                    lhs = AExpr::Lam(env1[k].0, Box::new(lhs));
                    rhs = AExpr::Lam(env2[rho[k]].0, Box::new(rhs));
                }
                child.push_eq(lhs, rhs);
                child.steps += 1;
                self.stats.max_branch_steps = self.stats.max_branch_steps.max(child.steps);
                out.push(child);
            }
            return Step::Branch(out);
        }
        self.stats.stuck += 1;
        Step::Fail("Stuck")
    }

    /// Instantiates every atom variable in `open`, then eliminates
    /// redundant fixpoint equations.
    fn elim_ab(&mut self, st: &St, open: Vec<AtomVar>) -> Vec<St> {
        *self.stats.rules.entry("ElimAB").or_default() += 1;
        let pool: Vec<Atom> = st.atoms().into_iter().collect();
        let mut supply = AtomSupply::avoiding(&pool);
        let fresh: Vec<Atom> = open.iter().map(|_| supply.fresh()).collect();
        let mut choices: Vec<Vec<Atom>> = Vec::new();
        guesses(&pool, &fresh, open.len(), &mut Vec::new(), &mut choices);
        let mut out = Vec::new();
        for choice in choices {
            let mut child = st.clone();
            for (a, b) in open.iter().zip(&choice) {
                child.assign.insert(*a, *b);
                child.elim.push((*a, *b));
            }
            if !child.resimplify() {
                *self.stats.failures.entry("FailF").or_default() += 1;
                continue;
            }
            let dropped = child.reduce_fixpoints();
            *self.stats.rules.entry("ElimFP").or_default() += dropped as u64;
            let m = child.max_fix();
            self.stats.max_fixpoints_after_elimab = self.stats.max_fixpoints_after_elimab.max(m);
            if m as f64 > self.p {
                self.stats.elimab_over_bound += 1;
            }
            child.steps += 1;
            self.stats.max_branch_steps = self.stats.max_branch_steps.max(child.steps);
            out.push(child);
        }
        out
    }

    /// Rule (3a)/(3b): `X ≐ by`.
    fn eliminate(&mut self, st: &mut St, x: Var, by: AExpr) -> bool {
        let eqs = std::mem::take(&mut st.eqs);
        for (l, r) in eqs {
            let l = if l.has_var(x) { l.subst(x, &by, &mut st.g) } else { l };
            let r = if r.has_var(x) { r.subst(x, &by, &mut st.g) } else { r };
            let eq = st.normalize(l, r);
            st.eqs.push(eq);
        }
        if let Some(taus) = st.fix.remove(&x) {
            for tau in taus {
                let t = by.permute(tau, &mut st.g);
                st.push_eq(by.clone(), t);
            }
        }
        if !st.subst_nabla(x, &by) {
            return false;
        }
        st.theta.push((x, by));
        true
    }

    fn dfs(&mut self, mut st: St) -> Result<(), Stop> {
        loop {
            if self.stats.states >= self.cfg.budget {
                return Err(Stop::Budget);
            }
            self.stats.states += 1;
            match self.step(&mut st) {
                Step::Next => {}
                Step::Fail(why) => {
                    *self.stats.failures.entry(why).or_default() += 1;
                    return Ok(());
                }
                Step::Done(u) => {
                    if !self.found.contains(&u) {
                        self.found.push(*u);
                    }
                    return match self.cfg.mode {
                        Mode::Decision => Err(Stop::Done),
                        Mode::Collecting => Ok(()),
                    };
                }
                Step::Branch(children) => {
                    for c in children {
                        self.dfs(c)?;
                    }
                    return Ok(());
                }
            }
        }
    }
}

/// Sequences of images: each position takes a present atom, an atom made
/// fresh by an earlier position, or the next fresh atom.
fn guesses(pool: &[Atom], fresh: &[Atom], n: usize, acc: &mut Vec<Atom>, out: &mut Vec<Vec<Atom>>) {
    if acc.len() == n {
        out.push(acc.clone());
        return;
    }
    let used = acc.iter().filter(|a| fresh.contains(a)).collect::<BTreeSet<_>>().len();
    let options: Vec<Atom> = pool.iter().chain(&fresh[..=used.min(fresh.len() - 1)]).copied().collect();
    for a in options {
        acc.push(a);
        guesses(pool, fresh, n, acc, out);
        acc.pop();
    }
}

fn has_cycle(eqs: &[Eq], defining: &[usize]) -> bool {
    let mut graph: HashMap<Var, BTreeSet<Var>> = HashMap::new();
    for &i in defining {
        let (AExpr::Susp(_, x), e) = &eqs[i] else { continue };
        e.collect_vars(graph.entry(*x).or_default());
    }
    // 0 unvisited, 1 on stack, 2 done
    let mut mark: HashMap<Var, u8> = HashMap::new();
    fn visit(x: Var, g: &HashMap<Var, BTreeSet<Var>>, mark: &mut HashMap<Var, u8>) -> bool {
        match mark.get(&x) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        mark.insert(x, 1);
        if let Some(next) = g.get(&x) {
            for y in next {
                if visit(*y, g, mark) {
                    return true;
                }
            }
        }
        mark.insert(x, 2);
        false
    }
    let keys: Vec<Var> = graph.keys().copied().collect();
    keys.into_iter().any(|x| visit(x, &graph, &mut mark))
}

/// Binder distinctness `W_i # W_j` for every letrec environment.
fn binder_constraints(e: &AExpr, out: &mut Vec<AFresh>) {
    let mut envs = Vec::new();
    e.letrecs(&mut envs);
    for env in envs {
        for i in 0..env.len() {
            for j in i + 1..env.len() {
                out.push(AFresh::Fresh(env[i].0, AExpr::Name(env[j].0)));
            }
        }
    }
}

/// Size of the problem, permutations not counted.
pub fn av_problem_size(eqs: &[(Term, Term)], fresh: &[(W, Term)]) -> Result<usize, TierError> {
    let mut g = Grammar::new();
    let mut s = 0;
    for (l, r) in eqs {
        s += AExpr::from_term(l, &mut g)?.size() + AExpr::from_term(r, &mut g)?.size();
    }
    for (_, e) in fresh {
        s += 1 + AExpr::from_term(e, &mut g)?.size();
    }
    Ok(s)
}

pub fn letrec_unify_av(eqs: &[(Term, Term)], fresh: &[(W, Term)], cfg: &AvConfig) -> Result<AvOutcome, AvError> {
    let size = av_problem_size(eqs, fresh)?;
    let mut st = St {
        g: Grammar::new(),
        eqs: Vec::new(),
        fix: BTreeMap::new(),
        nabla: Vec::new(),
        theta: Vec::new(),
        assign: Assign::new(),
        elim: Vec::new(),
        steps: 0,
    };
    let mut injected = Vec::new();
    for (l, r) in eqs {
        let l = AExpr::from_term(l, &mut st.g)?;
        let r = AExpr::from_term(r, &mut st.g)?;
        binder_constraints(&l, &mut injected);
        binder_constraints(&r, &mut injected);
        st.push_eq(l, r);
    }
    for (w, e) in fresh {
        let w = st.g.from_w(w);
        let e = AExpr::from_term(e, &mut st.g)?;
        binder_constraints(&e, &mut injected);
        injected.push(AFresh::Fresh(w, e));
    }
    let p = cfg.strategy.threshold(size);
    let mut eng = Engine { cfg, p, stats: AvStats { size, threshold: p, ..AvStats::default() }, found: Vec::new() };
    let ok = injected.into_iter().all(|c| st.add_fresh(c));
    if !ok {
        *eng.stats.failures.entry("FailF").or_default() += 1;
        return Ok(AvOutcome { unifiers: Vec::new(), stats: eng.stats });
    }
    if let Err(Stop::Budget) = eng.dfs(st) {
        return Err(AvError::Budget(cfg.budget));
    }
    Ok(AvOutcome { unifiers: eng.found, stats: eng.stats })
}

/// Guesses every atom variable up front, over the atoms of the problem
/// plus one fresh atom per atom variable, and runs the atom-only algorithm
/// on each instance.
pub fn unify_av_baseline(eqs: &[(Term, Term)], fresh: &[(W, Term)], budget: u64) -> Result<bool, AvError> {
    let mut atoms = BTreeSet::new();
    let mut avars = BTreeSet::new();
    for (l, r) in eqs {
        for t in [l, r] {
            let (a, v) = t.names();
            atoms.extend(a);
            avars.extend(v);
        }
    }
    for (w, e) in fresh {
        let (a, v) = Term::Atom(w.clone()).names();
        atoms.extend(a);
        avars.extend(v);
        let (a, v) = e.names();
        atoms.extend(a);
        avars.extend(v);
    }
    let avars: Vec<AtomVar> = avars.into_iter().collect();
    let mut supply = AtomSupply::avoiding(&atoms);
    let pool: Vec<Atom> = atoms.iter().copied().chain(avars.iter().map(|_| supply.fresh())).collect();
    let mut idx = vec![0usize; avars.len()];
    let cfg = Config { budget, ..Config::default() };
    loop {
        let m: HashMap<AtomVar, Atom> = avars.iter().zip(&idx).map(|(a, i)| (*a, pool[*i])).collect();
        if let Some(solvable) = instance(eqs, fresh, &m, &cfg)? {
            if solvable {
                return Ok(true);
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(false);
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

/// `None` when the instance has a letrec with equal binders.
fn instance(eqs: &[(Term, Term)], fresh: &[(W, Term)], m: &HashMap<AtomVar, Atom>, cfg: &Config) -> Result<Option<bool>, AvError> {
    let mut ground = Vec::new();
    for (l, r) in eqs {
        match (l.instantiate(m).to_expr(), r.instantiate(m).to_expr()) {
            (Ok(l), Ok(r)) => ground.push((l, r)),
            (Err(TierError::DuplicateBinder(_)), _) | (_, Err(TierError::DuplicateBinder(_))) => return Ok(None),
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        }
    }
    let mut fs = Vec::new();
    for (w, e) in fresh {
        let a = w.instantiate(m).eval().expect("all atom variables are instantiated");
        match e.instantiate(m).to_expr() {
            Ok(e) => fs.push((a, e)),
            Err(TierError::DuplicateBinder(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some(!letrec_unify(&ground, &fs, cfg)?.unifiers.is_empty()))
}
