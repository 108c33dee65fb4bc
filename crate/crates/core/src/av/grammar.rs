//! Permutation grammars: permutations over atoms and atom variables kept as
//! a deterministic, acyclic, append-only rule set with paired inverses.

use crate::name::{Atom, AtomVar};
use crate::perm::Perm;
use crate::syntax::{SPerm, V, W};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A nonterminal. `0` is the identity.
pub type Nt = u32;

/// `P·V`
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GW {
    pub p: Nt,
    pub v: V,
}

impl GW {
    pub fn plain(v: V) -> GW {
        GW { p: 0, v }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sym {
    Id,
    Swap(GW, GW),
    N(Nt),
}

#[derive(Clone, Debug)]
struct Rule {
    rhs: Vec<Sym>,
    inv: Nt,
    avars: Vec<AtomVar>,
}

/// Assignment of atom variables to atoms.
pub type Assign = BTreeMap<AtomVar, Atom>;

#[derive(Clone, Debug)]
pub struct Grammar {
    rules: Vec<Rule>,
}

impl Default for Grammar {
    fn default() -> Grammar {
        Grammar::new()
    }
}

fn merge(a: &[AtomVar], b: &[AtomVar]) -> Vec<AtomVar> {
    let s: BTreeSet<AtomVar> = a.iter().chain(b).copied().collect();
    s.into_iter().collect()
}

impl Grammar {
    pub fn new() -> Grammar {
        Grammar { rules: vec![Rule { rhs: vec![Sym::Id], inv: 0, avars: Vec::new() }] }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self) -> Nt {
        0
    }

    pub fn rhs(&self, p: Nt) -> &[Sym] {
        &self.rules[p as usize].rhs
    }

    fn push(&mut self, rhs: Vec<Sym>, inv_rhs: Option<Vec<Sym>>, avars: Vec<AtomVar>) -> Nt {
        let p = self.rules.len() as Nt;
        match inv_rhs {
            None => self.rules.push(Rule { rhs, inv: p, avars }),
            Some(inv) => {
                self.rules.push(Rule { rhs, inv: p + 1, avars: avars.clone() });
                self.rules.push(Rule { rhs: inv, inv: p, avars });
            }
        }
        p
    }

    fn w_avars(&self, w: &GW) -> Vec<AtomVar> {
        let own: &[AtomVar] = match &w.v {
            V::Var(a) => std::slice::from_ref(a),
            V::Atom(_) => &[],
        };
        merge(own, &self.rules[w.p as usize].avars)
    }

    /// `(w1 w2)`, its own inverse.
    pub fn swap(&mut self, a: GW, b: GW) -> Nt {
        if a == b {
            return 0;
        }
        let avars = merge(&self.w_avars(&a), &self.w_avars(&b));
        self.push(vec![Sym::Swap(a, b)], None, avars)
    }

    /// `p ∘ q`: `q` acts first.
    pub fn compose(&mut self, p: Nt, q: Nt) -> Nt {
        if p == 0 {
            return q;
        }
        if q == 0 {
            return p;
        }
        if self.inverse(p) == q {
            return 0;
        }
        let avars = merge(&self.rules[p as usize].avars, &self.rules[q as usize].avars);
        let (ip, iq) = (self.inverse(p), self.inverse(q));
        self.push(vec![Sym::N(p), Sym::N(q)], Some(vec![Sym::N(iq), Sym::N(ip)]), avars)
    }

    pub fn inverse(&self, p: Nt) -> Nt {
        self.rules[p as usize].inv
    }

    pub fn permute_w(&mut self, p: Nt, w: GW) -> GW {
        GW { p: self.compose(p, w.p), v: w.v }
    }

    pub fn from_sperm(&mut self, s: &SPerm) -> Nt {
        let mut acc = 0;
        for (a, b) in s.0.iter().rev() {
            let (a, b) = (self.from_w(a), self.from_w(b));
            let t = self.swap(a, b);
            acc = self.compose(t, acc);
        }
        acc
    }

    pub fn from_w(&mut self, w: &W) -> GW {
        GW { p: self.from_sperm(&w.perm), v: w.v }
    }

    pub fn from_perm(&mut self, p: &Perm) -> Nt {
        self.from_sperm(&SPerm::from_perm(p))
    }

    /// Atom variables occurring in `val(p)`.
    pub fn avars(&self, p: Nt) -> &[AtomVar] {
        &self.rules[p as usize].avars
    }

    pub fn w_has_unassigned(&self, w: &GW, assign: &Assign) -> bool {
        self.w_avars(w).iter().any(|a| !assign.contains_key(a))
    }

    pub fn collect_atoms(&self, p: Nt, out: &mut BTreeSet<Atom>) {
        let mut seen = BTreeSet::new();
        self.atoms_rec(p, out, &mut seen);
    }

    fn atoms_rec(&self, p: Nt, out: &mut BTreeSet<Atom>, seen: &mut BTreeSet<Nt>) {
        if !seen.insert(p) {
            return;
        }
        for s in &self.rules[p as usize].rhs {
            match s {
                Sym::Id => {}
                Sym::N(q) => self.atoms_rec(*q, out, seen),
                Sym::Swap(a, b) => {
                    for w in [a, b] {
                        if let V::Atom(x) = w.v {
                            out.insert(x);
                        }
                        self.atoms_rec(w.p, out, seen);
                    }
                }
            }
        }
    }

    /// `val(p)` under `assign`, or `None` if an unassigned atom variable
    /// is involved.
    pub fn eval(&self, p: Nt, assign: &Assign) -> Option<Perm> {
        if self.rules[p as usize].avars.iter().any(|a| !assign.contains_key(a)) {
            return None;
        }
        let mut memo = HashMap::new();
        Some(self.eval_rec(p, assign, &mut memo))
    }

    fn eval_rec(&self, p: Nt, assign: &Assign, memo: &mut HashMap<Nt, Perm>) -> Perm {
        if let Some(v) = memo.get(&p) {
            return v.clone();
        }
        let mut acc = Perm::id();
        for s in &self.rules[p as usize].rhs {
            let v = match s {
                Sym::Id => Perm::id(),
                Sym::N(q) => self.eval_rec(*q, assign, memo),
                Sym::Swap(a, b) => {
                    let a = self.eval_w_rec(a, assign, memo);
                    let b = self.eval_w_rec(b, assign, memo);
                    Perm::swap(a, b)
                }
            };
            acc = acc.compose(&v);
        }
        memo.insert(p, acc.clone());
        acc
    }

    fn eval_w_rec(&self, w: &GW, assign: &Assign, memo: &mut HashMap<Nt, Perm>) -> Atom {
        let base = match w.v {
            V::Atom(a) => a,
            V::Var(a) => assign[&a],
        };
        self.eval_rec(w.p, assign, memo).apply(base)
    }

    pub fn eval_w(&self, w: &GW, assign: &Assign) -> Option<Atom> {
        let base = match w.v {
            V::Atom(a) => a,
            V::Var(a) => *assign.get(&a)?,
        };
        Some(self.eval(w.p, assign)?.apply(base))
    }

    /// The explicit map of a nonterminal without atom variables.
    pub fn ground_simplify(&self, p: Nt) -> Result<Perm, AtomVar> {
        match self.rules[p as usize].avars.first() {
            Some(a) => Err(*a),
            None => Ok(self.eval(p, &Assign::new()).unwrap()),
        }
    }

    /// Full expansion into a swapping list. Exponential in the worst case.
    pub fn expand(&self, p: Nt) -> SPerm {
        let mut out = Vec::new();
        self.expand_into(p, &mut out);
        SPerm(out)
    }

    fn expand_into(&self, p: Nt, out: &mut Vec<(W, W)>) {
        for s in &self.rules[p as usize].rhs {
            match s {
                Sym::Id => {}
                Sym::N(q) => self.expand_into(*q, out),
                Sym::Swap(a, b) => out.push((self.expand_w(a), self.expand_w(b))),
            }
        }
    }

    pub fn expand_w(&self, w: &GW) -> W {
        W { perm: self.expand(w.p), v: w.v }
    }

    /// A readable form: explicit when ground under `assign`, expanded
    /// otherwise.
    pub fn show(&self, p: Nt, assign: &Assign) -> SPerm {
        match self.eval(p, assign) {
            Some(perm) => SPerm::from_perm(&perm),
            None => {
                let e = self.expand(p);
                e.instantiate(&assign.iter().map(|(k, v)| (*k, *v)).collect())
            }
        }
    }

    pub fn show_w(&self, w: &GW, assign: &Assign) -> W {
        match self.eval_w(w, assign) {
            Some(a) => W::atom(a),
            None => W { perm: self.show(w.p, assign), v: w.v },
        }
    }
}
