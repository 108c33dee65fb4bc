//! Search for binder correspondences between a pattern and a ground target.
//!
//! Both alpha-equivalence and one-sided matching reduce to the same question:
//! is there a bijection between the binders of the two sides, scope by scope,
//! such that every atom occurrence of the pattern agrees with the target and
//! every variable occurrence can be given a consistent image? Lambda scopes
//! fix their pair up front. Letrec scopes start with an empty partial
//! bijection that grows as atoms are compared; a letrec environment is done
//! when every pattern binding has been paired with a target binding.
//!
//! Pairings that are forced by the partial bijection are made first. When
//! nothing is forced, the pattern binding with the fewest viable partners is
//! branched on. Variable images are only built at the leaves, once every
//! binder of every scope has a partner.

use crate::name::{Atom, AtomSupply, EnvVar, Var, VarSupply};
use crate::pattern::{PBind, Pat, Subst};
use crate::perm::Perm;
use crate::term::Expr;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Stop at the first result.
    #[default]
    Decision,
    /// Explore every branch and return every distinct result.
    Collecting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {0} states exhausted")]
pub struct BudgetExceeded(pub u64);

#[derive(Debug, Clone, Default)]
pub struct MatchOutcome {
    pub solutions: Vec<Subst>,
    /// Search states visited.
    pub states: u64,
}

const ROOT: usize = 0;

#[derive(Clone, Debug)]
struct Scope {
    parent: usize,
    pat: Vec<Atom>,
    tgt: Vec<Atom>,
    /// (pattern binder, target binder)
    pairs: Vec<(Atom, Atom)>,
}

#[derive(Clone, Debug)]
enum PB<'a> {
    Bind(Atom, &'a Pat),
    /// A binding contributed by an environment variable: binder and the
    /// variable standing for its right-hand side.
    Tmpl(Atom, Var),
}

impl PB<'_> {
    fn binder(&self) -> Atom {
        match self {
            PB::Bind(a, _) | PB::Tmpl(a, _) => *a,
        }
    }
}

#[derive(Clone, Debug)]
struct Env<'a> {
    scope: usize,
    pat: Vec<PB<'a>>,
    tgt: Vec<usize>,
    tenv: &'a [(Atom, Expr)],
}

#[derive(Clone, Debug)]
struct Occ<'a> {
    perm: Perm,
    tgt: &'a Expr,
    ctx: usize,
}

type Task<'a> = (&'a Pat, &'a Expr, usize);

#[derive(Clone)]
struct State<'a> {
    scopes: Vec<Scope>,
    todo: Vec<Task<'a>>,
    envs: Vec<Env<'a>>,
    deferred: Vec<Task<'a>>,
    occs: BTreeMap<Var, Vec<Occ<'a>>>,
    tmpls: BTreeMap<EnvVar, Vec<(Atom, Var)>>,
    atoms: AtomSupply,
    vars: VarSupply,
    trial: bool,
    undo: Vec<usize>,
    trial_occs: Vec<(Var, Occ<'a>)>,
}

enum Pick {
    Leaf,
    Fail,
    Branch(usize, usize, Vec<usize>),
}

impl<'a> State<'a> {
    fn push_scope(&mut self, parent: usize, pat: Vec<Atom>, tgt: Vec<Atom>) -> usize {
        self.scopes.push(Scope { parent, pat, tgt, pairs: Vec::new() });
        self.scopes.len() - 1
    }

    fn fwd(&self, s: usize, x: Atom) -> Option<Atom> {
        self.scopes[s].pairs.iter().find(|p| p.0 == x).map(|p| p.1)
    }

    fn bwd(&self, s: usize, y: Atom) -> Option<Atom> {
        self.scopes[s].pairs.iter().find(|p| p.1 == y).map(|p| p.0)
    }

    fn assign(&mut self, s: usize, x: Atom, y: Atom) -> bool {
        match (self.fwd(s, x), self.bwd(s, y)) {
            (Some(y2), _) => y2 == y,
            (None, Some(_)) => false,
            (None, None) => {
                self.scopes[s].pairs.push((x, y));
                if self.trial {
                    self.undo.push(s);
                }
                true
            }
        }
    }

    fn compare(&mut self, x: Atom, y: Atom, ctx: usize) -> bool {
        let mut s = ctx;
        while s != ROOT {
            let sc = &self.scopes[s];
            match (sc.pat.contains(&x), sc.tgt.contains(&y)) {
                (false, false) => s = sc.parent,
                (true, true) => return self.assign(s, x, y),
                _ => return false,
            }
        }
        x == y
    }

    fn add_occ(&mut self, x: Var, perm: &Perm, tgt: &'a Expr, ctx: usize) -> bool {
        let same = |o: &Occ| o.ctx == ctx && o.perm == *perm;
        let found = self
            .occs
            .get(&x)
            .and_then(|v| v.iter().find(|o| same(o)))
            .or_else(|| self.trial_occs.iter().find(|(y, o)| *y == x && same(o)).map(|(_, o)| o));
        if let Some(o) = found {
            return o.tgt == tgt || alpha_eq(o.tgt, tgt);
        }
        let occ = Occ { perm: perm.clone(), tgt, ctx };
        if self.trial {
            self.trial_occs.push((x, occ));
        } else {
            self.occs.entry(x).or_default().push(occ);
        }
        true
    }

    fn decompose(&mut self, stack: &mut Vec<Task<'a>>) -> bool {
        while let Some((p, t, ctx)) = stack.pop() {
            let ok = match (p, t) {
                (Pat::Susp(pi, x), _) => self.add_occ(*x, pi, t, ctx),
                (Pat::Atom(a), Expr::Atom(b)) => self.compare(*a, *b, ctx),
                (Pat::Lam(a, ps), Expr::Lam(b, ts)) => {
                    let s = self.push_scope(ctx, vec![*a], vec![*b]);
                    self.scopes[s].pairs.push((*a, *b));
                    stack.push((ps, ts, s));
                    true
                }
                (Pat::App(f, ps), Expr::App(g, ts)) => {
                    let ok = f == g && ps.len() == ts.len();
                    if ok {
                        stack.extend(ps.iter().zip(ts).rev().map(|(p, t)| (p, t, ctx)));
                    }
                    ok
                }
                (Pat::Letrec(pe, _), Expr::Letrec(te, _)) if self.trial => count_ok(pe, te.len()),
                (Pat::Letrec(..), Expr::Letrec(..)) => self.enter_letrec(p, t, ctx, stack),
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn enter_letrec(&mut self, p: &'a Pat, t: &'a Expr, ctx: usize, stack: &mut Vec<Task<'a>>) -> bool {
        let (Pat::Letrec(pe, pb), Expr::Letrec(te, tb)) = (p, t) else { unreachable!() };
        if pe.iter().any(|b| matches!(b, PBind::Env(e) if !self.tmpls.contains_key(e))) {
            if !count_ok(pe, te.len()) {
                return false;
            }
            self.deferred.push((p, t, ctx));
            return true;
        }
        let mut binders = Vec::new();
        let mut pbs = Vec::new();
        for b in pe {
            match b {
                PBind::Bind(a, e) => {
                    binders.push(*a);
                    pbs.push(PB::Bind(*a, e));
                }
                PBind::Env(e) => {
                    for (c, x) in &self.tmpls[e] {
                        binders.push(*c);
                        pbs.push(PB::Tmpl(*c, *x));
                    }
                }
            }
        }
        if pbs.len() != te.len() || binders.iter().collect::<BTreeSet<_>>().len() != binders.len() {
            return false;
        }
        let s = self.push_scope(ctx, binders, te.iter().map(|(b, _)| *b).collect());
        self.envs.push(Env { scope: s, pat: pbs, tgt: (0..te.len()).collect(), tenv: te });
        stack.push((pb, tb, s));
        true
    }

    fn drain(&mut self) -> bool {
        let mut stack = std::mem::take(&mut self.todo);
        let ok = self.decompose(&mut stack);
        self.todo = stack;
        ok
    }

    fn pair(&mut self, ei: usize, k: usize, j: usize) -> bool {
        let env = &mut self.envs[ei];
        let pb = env.pat.remove(k);
        env.tgt.retain(|&i| i != j);
        let (scope, tenv) = (env.scope, env.tenv);
        let (y, rhs) = (&tenv[j].0, &tenv[j].1);
        if !self.assign(scope, pb.binder(), *y) {
            return false;
        }
        match pb {
            PB::Bind(_, p) => {
                self.todo.push((p, rhs, scope));
                true
            }
            PB::Tmpl(_, x) => self.add_occ(x, &Perm::id(), rhs, scope),
        }
    }

    /// Pairs every binding whose binder already has a partner.
    /// Returns `None` on failure, otherwise whether anything happened.
    fn force(&mut self) -> Option<bool> {
        let mut progressed = false;
        for ei in 0..self.envs.len() {
            loop {
                let env = &self.envs[ei];
                let hit = env.pat.iter().enumerate().find_map(|(k, pb)| self.fwd(env.scope, pb.binder()).map(|y| (k, y)));
                let Some((k, y)) = hit else { break };
                let j = env.tgt.iter().copied().find(|&j| env.tenv[j].0 == y)?;
                if !self.pair(ei, k, j) {
                    return None;
                }
                progressed = true;
            }
        }
        self.envs.retain(|e| !e.pat.is_empty());
        Some(progressed)
    }

    fn trial(&mut self, ei: usize, k: usize, j: usize) -> bool {
        let env = &self.envs[ei];
        let (scope, pb, tenv) = (env.scope, env.pat[k].clone(), env.tenv);
        let (y, rhs) = (tenv[j].0, &tenv[j].1);
        let viable = match (&pb, rhs) {
            (PB::Bind(_, Pat::Susp(..)), _) | (PB::Tmpl(..), _) => true,
            (PB::Bind(_, Pat::Atom(_)), Expr::Atom(_)) | (PB::Bind(_, Pat::Lam(..)), Expr::Lam(..)) => true,
            (PB::Bind(_, Pat::App(f, ps)), Expr::App(g, ts)) => f == g && ps.len() == ts.len(),
            (PB::Bind(_, Pat::Letrec(pe, _)), Expr::Letrec(te, _)) => count_ok(pe, te.len()),
            _ => false,
        };
        if !viable {
            return false;
        }
        self.trial = true;
        let nscopes = self.scopes.len();
        let ok = self.assign(scope, pb.binder(), y)
            && match pb {
                PB::Bind(_, p) => self.decompose(&mut vec![(p, rhs, scope)]),
                PB::Tmpl(_, x) => self.add_occ(x, &Perm::id(), rhs, scope),
            };
        for s in std::mem::take(&mut self.undo).into_iter().rev() {
            self.scopes[s].pairs.pop();
        }
        self.scopes.truncate(nscopes);
        self.trial_occs.clear();
        self.trial = false;
        ok
    }

    fn pick(&mut self) -> Pick {
        let mut best: Option<(usize, usize, Vec<usize>)> = None;
        for ei in 0..self.envs.len() {
            for k in 0..self.envs[ei].pat.len() {
                let scope = self.envs[ei].scope;
                let cands: Vec<usize> = self.envs[ei].tgt.clone();
                let mut ok = Vec::new();
                for j in cands {
                    let y = self.envs[ei].tenv[j].0;
                    if self.bwd(scope, y).is_none() && self.trial(ei, k, j) {
                        ok.push(j);
                        if best.as_ref().is_some_and(|b| ok.len() >= b.2.len()) {
                            break;
                        }
                    }
                }
                if ok.is_empty() {
                    return Pick::Fail;
                }
                if best.as_ref().is_none_or(|b| ok.len() < b.2.len()) {
                    let single = ok.len() == 1;
                    best = Some((ei, k, ok));
                    if single {
                        let (ei, k, ok) = best.unwrap();
                        return Pick::Branch(ei, k, ok);
                    }
                }
            }
        }
        match best {
            Some((ei, k, ok)) => Pick::Branch(ei, k, ok),
            None => Pick::Leaf,
        }
    }

    /// Renames the free atoms of a target subterm into the pattern's names.
    fn resolve(&self, t: &Expr, ctx: usize) -> Option<Expr> {
        let mut m = HashMap::new();
        for y in t.free_atoms() {
            let mut s = ctx;
            let mut level = None;
            while s != ROOT {
                if self.scopes[s].tgt.contains(&y) {
                    level = Some(s);
                    break;
                }
                s = self.scopes[s].parent;
            }
            let (x, stop) = match level {
                Some(i) => (self.bwd(i, y)?, i),
                None => (y, ROOT),
            };
            let mut s = ctx;
            while s != stop {
                if self.scopes[s].pat.contains(&x) {
                    return None;
                }
                s = self.scopes[s].parent;
            }
            if x != y {
                m.insert(y, x);
            }
        }
        Some(t.rename_free(&m))
    }

    fn images(&self) -> Option<BTreeMap<Var, Expr>> {
        let mut out: BTreeMap<Var, Expr> = BTreeMap::new();
        for (x, occs) in &self.occs {
            for o in occs {
                let img = self.resolve(o.tgt, o.ctx)?.permute(&o.perm.inverse());
                match out.get(x) {
                    Some(prev) => {
                        if *prev != img && !alpha_eq(prev, &img) {
                            return None;
                        }
                    }
                    None => {
                        out.insert(*x, img);
                    }
                }
            }
        }
        Some(out)
    }

    fn partner(&self, c: Atom) -> Option<Atom> {
        (1..self.scopes.len()).find_map(|s| self.fwd(s, c))
    }
}

fn count_ok(pe: &[PBind], m: usize) -> bool {
    let n = pe.iter().filter(|b| matches!(b, PBind::Bind(..))).count();
    if pe.len() == n {
        n == m
    } else {
        n <= m
    }
}

/// Ways to give each not yet instantiated environment variable of one
/// letrec a binder list.
fn env_choices(st: &State, pe: &[PBind], inner: &Pat, m: usize) -> Vec<Vec<(EnvVar, Vec<Option<Atom>>)>> {
    let explicit: Vec<Atom> = pe.iter().filter_map(|b| if let PBind::Bind(a, _) = b { Some(*a) } else { None }).collect();
    let mut known = 0;
    let mut unknown: Vec<(EnvVar, usize)> = Vec::new();
    let mut used: BTreeSet<Atom> = explicit.iter().copied().collect();
    for b in pe {
        if let PBind::Env(e) = b {
            match st.tmpls.get(e) {
                Some(t) => {
                    known += t.len();
                    used.extend(t.iter().map(|(c, _)| *c));
                }
                None => match unknown.iter_mut().find(|(f, _)| f == e) {
                    Some(u) => u.1 += 1,
                    None => unknown.push((*e, 1)),
                },
            }
        }
    }
    let Some(slack) = m.checked_sub(explicit.len() + known) else { return Vec::new() };
    let cands: Vec<Atom> = inner.atoms().into_iter().filter(|a| !used.contains(a)).collect();
    let mut out = Vec::new();
    let mut ks = vec![0; unknown.len()];
    split_slack(&unknown, 0, slack, &mut ks, &mut |ks| {
        name_choices(&unknown, ks, 0, &cands, &mut Vec::new(), &mut out);
    });
    out
}

fn split_slack(u: &[(EnvVar, usize)], i: usize, left: usize, ks: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if i == u.len() {
        if left == 0 {
            f(ks);
        }
        return;
    }
    for k in 0..=left / u[i].1 {
        ks[i] = k;
        split_slack(u, i + 1, left - k * u[i].1, ks, f);
    }
}

fn name_choices(
    u: &[(EnvVar, usize)],
    ks: &[usize],
    i: usize,
    cands: &[Atom],
    acc: &mut Vec<(EnvVar, Vec<Option<Atom>>)>,
    out: &mut Vec<Vec<(EnvVar, Vec<Option<Atom>>)>>,
) {
    if i == u.len() {
        out.push(acc.clone());
        return;
    }
    let taken: BTreeSet<Atom> = acc.iter().flat_map(|(_, v)| v.iter().flatten().copied()).collect();
    let free: Vec<Atom> = cands.iter().copied().filter(|a| !taken.contains(a)).collect();
    for size in 0..=ks[i].min(free.len()) {
        for subset in combinations(&free, size) {
            let mut names: Vec<Option<Atom>> = subset.into_iter().map(Some).collect();
            names.resize(ks[i], None);
            acc.push((u[i].0, names));
            name_choices(u, ks, i + 1, cands, acc, out);
            acc.pop();
        }
    }
}

fn combinations(xs: &[Atom], k: usize) -> Vec<Vec<Atom>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        for mut rest in combinations(&xs[i + 1..], k - 1) {
            rest.insert(0, xs[i]);
            out.push(rest);
        }
    }
    out
}

enum Stop {
    Done,
    Budget,
}

struct Search<'a> {
    eqs: &'a [(Pat, Expr)],
    mode: Mode,
    budget: u64,
    states: u64,
    pattern_atoms: BTreeSet<Atom>,
    pattern_vars: BTreeSet<Var>,
    solutions: Vec<Subst>,
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> Result<(), Stop> {
        self.states += 1;
        if self.states > self.budget {
            Err(Stop::Budget)
        } else {
            Ok(())
        }
    }

    fn run(&mut self, mut st: State<'a>) -> Result<(), Stop> {
        loop {
            self.tick()?;
            if !st.drain() {
                return Ok(());
            }
            match st.force() {
                None => return Ok(()),
                Some(true) => continue,
                Some(false) => {}
            }
            if let Some((p, t, ctx)) = st.deferred.pop() {
                let (Pat::Letrec(pe, _), Expr::Letrec(te, _)) = (p, t) else { unreachable!() };
                for choice in env_choices(&st, pe, p, te.len()) {
                    let mut child = st.clone();
                    for (e, names) in choice {
                        let tm = names.into_iter().map(|n| (n.unwrap_or_else(|| child.atoms.fresh()), child.vars.fresh())).collect();
                        child.tmpls.insert(e, tm);
                    }
                    child.todo.push((p, t, ctx));
                    self.run(child)?;
                }
                return Ok(());
            }
            return match st.pick() {
                Pick::Fail => Ok(()),
                Pick::Leaf => self.finish(&st),
                Pick::Branch(ei, k, cands) => {
                    for j in cands {
                        let mut child = st.clone();
                        if child.pair(ei, k, j) {
                            self.run(child)?;
                        }
                    }
                    Ok(())
                }
            };
        }
    }

    fn finish(&mut self, st: &State<'a>) -> Result<(), Stop> {
        let Some(images) = st.images() else { return Ok(()) };
        let mut sol = Subst::default();
        for x in &self.pattern_vars {
            sol.vars.insert(*x, images[x].clone());
        }
        for (e, tm) in &st.tmpls {
            sol.envs.insert(*e, tm.iter().map(|(c, x)| (*c, images[x].clone())).collect());
        }
        let sol = self.tidy(st, sol);
        if !self.solutions.iter().any(|s| same_subst(s, &sol)) {
            self.solutions.push(sol);
        }
        match self.mode {
            Mode::Decision => Err(Stop::Done),
            Mode::Collecting => Ok(()),
        }
    }

    /// Gives invented environment binders the names of their target
    /// partners where that keeps the solution valid.
    fn tidy(&self, st: &State<'a>, mut sol: Subst) -> Subst {
        let binders: Vec<Atom> = sol.envs.values().flatten().map(|(c, _)| *c).collect();
        for c in binders {
            if self.pattern_atoms.contains(&c) {
                continue;
            }
            let Some(y) = st.partner(c) else { continue };
            if y == c || self.pattern_atoms.contains(&y) || subst_atoms(&sol).contains(&y) {
                continue;
            }
            let sw = Perm::swap(c, y);
            let cand = Subst {
                vars: sol.vars.iter().map(|(x, e)| (*x, e.permute(&sw))).collect(),
                envs: sol.envs.iter().map(|(e, bs)| (*e, bs.iter().map(|(a, r)| (sw.apply(*a), r.permute(&sw))).collect())).collect(),
            };
            if self.verify(&cand) {
                sol = cand;
            }
        }
        sol
    }

    fn verify(&self, s: &Subst) -> bool {
        self.eqs.iter().all(|(p, t)| p.instantiate(s).is_some_and(|e| alpha_eq(&e, t)))
    }
}

fn subst_atoms(s: &Subst) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for e in s.vars.values() {
        e.collect_atoms(&mut out);
    }
    for (a, e) in s.envs.values().flatten() {
        out.insert(*a);
        e.collect_atoms(&mut out);
    }
    out
}

/// Equal images up to alpha-equivalence; environment images as multisets.
pub fn same_subst(a: &Subst, b: &Subst) -> bool {
    a.vars.len() == b.vars.len()
        && a.vars.iter().all(|(x, e)| b.vars.get(x).is_some_and(|f| alpha_eq(e, f)))
        && a.envs.len() == b.envs.len()
        && a.envs.iter().all(|(x, bs)| b.envs.get(x).is_some_and(|cs| same_bindings(bs, cs)))
}

fn same_bindings(a: &[(Atom, Expr)], b: &[(Atom, Expr)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|(x, e)| {
        let hit = b.iter().enumerate().find(|(i, (y, f))| !used[*i] && x == y && alpha_eq(e, f)).map(|(i, _)| i);
        hit.map(|i| used[i] = true).is_some()
    })
}

/// Solves the matching problem `eqs`, each pattern against a ground target.
pub fn match_all(eqs: &[(Pat, Expr)], mode: Mode, budget: u64) -> Result<MatchOutcome, BudgetExceeded> {
    let mut pattern_atoms = BTreeSet::new();
    let mut pattern_vars = BTreeSet::new();
    let mut avoid = BTreeSet::new();
    for (p, t) in eqs {
        debug_assert!(t.is_ground(), "matching targets must be ground");
        pattern_atoms.extend(p.atoms());
        pattern_vars.extend(p.vars());
        t.collect_atoms(&mut avoid);
    }
    avoid.extend(pattern_atoms.iter().copied());
    let st = State {
        scopes: vec![Scope { parent: ROOT, pat: Vec::new(), tgt: Vec::new(), pairs: Vec::new() }],
        todo: eqs.iter().rev().map(|(p, t)| (p, t, ROOT)).collect(),
        envs: Vec::new(),
        deferred: Vec::new(),
        occs: BTreeMap::new(),
        tmpls: BTreeMap::new(),
        atoms: AtomSupply::avoiding(&avoid),
        vars: VarSupply::avoiding(&pattern_vars),
        trial: false,
        undo: Vec::new(),
        trial_occs: Vec::new(),
    };
    let mut search = Search { eqs, mode, budget, states: 0, pattern_atoms, pattern_vars, solutions: Vec::new() };
    match search.run(st) {
        Err(Stop::Budget) => Err(BudgetExceeded(budget)),
        _ => Ok(MatchOutcome { solutions: search.solutions, states: search.states }),
    }
}

/// Alpha-equivalence of ground expressions.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    if a == b {
        return true;
    }
    if a.size() != b.size() {
        return false;
    }
    let eqs = [(Pat::from(a), b.clone())];
    match_all(&eqs, Mode::Decision, u64::MAX).is_ok_and(|o| !o.solutions.is_empty())
}
