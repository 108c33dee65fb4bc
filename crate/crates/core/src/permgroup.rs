//! Membership in permutation groups generated by finitely many atom
//! permutations, via a base and strong generating set.

use crate::name::Atom;
use crate::perm::Perm;
use std::collections::BTreeSet;

type Dense = Vec<u32>;

fn compose(p: &Dense, q: &Dense) -> Dense {
    // p after q
    q.iter().map(|&x| p[x as usize]).collect()
}

fn inverse(p: &Dense) -> Dense {
    let mut out = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

fn is_id(p: &Dense) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

struct Level {
    point: u32,
    /// `trans[b]` maps the level's point to `b`, if `b` is in its orbit.
    trans: Vec<Option<Dense>>,
}

/// A stabilizer chain for the group generated by some permutations.
pub struct Chain {
    points: Vec<Atom>,
    strong: Vec<Dense>,
    levels: Vec<Level>,
}

impl Chain {
    pub fn new(gens: &[Perm]) -> Chain {
        let points: Vec<Atom> = gens.iter().flat_map(|g| g.domain_iter()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut chain = Chain { points, strong: Vec::new(), levels: Vec::new() };
        let dense: Vec<Dense> = gens.iter().filter_map(|g| chain.dense(g)).collect();
        for g in dense {
            if !is_id(&g) && !chain.strong.contains(&g) {
                chain.strong.push(g);
            }
        }
        chain.build();
        chain
    }

    fn dense(&self, p: &Perm) -> Option<Dense> {
        let n = self.points.len();
        let mut out: Dense = (0..n as u32).collect();
        for &(a, b) in p.pairs() {
            let i = self.points.binary_search(&a).ok()?;
            let j = self.points.binary_search(&b).ok()?;
            out[i] = j as u32;
        }
        Some(out)
    }

    fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    fn extend_base(&mut self) {
        let mut base = self.base();
        for s in &self.strong {
            if base.iter().all(|&b| s[b as usize] == b) {
                let moved = s.iter().enumerate().find(|(i, &x)| *i as u32 != x).unwrap().0 as u32;
                base.push(moved);
            }
        }
        let n = self.points.len();
        self.levels = base.into_iter().map(|point| Level { point, trans: vec![None; n] }).collect();
    }

    fn orbits(&mut self) {
        let n = self.points.len();
        for i in 0..self.levels.len() {
            let fixed: Vec<u32> = self.levels[..i].iter().map(|l| l.point).collect();
            let gens: Vec<&Dense> = self.strong.iter().filter(|s| fixed.iter().all(|&b| s[b as usize] == b)).collect();
            let beta = self.levels[i].point;
            let mut trans: Vec<Option<Dense>> = vec![None; n];
            trans[beta as usize] = Some((0..n as u32).collect());
            let mut queue = vec![beta];
            let mut k = 0;
            while k < queue.len() {
                let b = queue[k];
                k += 1;
                for s in &gens {
                    let c = s[b as usize];
                    if trans[c as usize].is_none() {
                        trans[c as usize] = Some(compose(s, trans[b as usize].as_ref().unwrap()));
                        queue.push(c);
                    }
                }
            }
            self.levels[i].trans = trans;
        }
    }

    /// Residue of `g` after sifting from level `from`.
    fn sift(&self, mut g: Dense, from: usize) -> Dense {
        for level in &self.levels[from..] {
            let x = g[level.point as usize];
            match &level.trans[x as usize] {
                Some(u) => g = compose(&inverse(u), &g),
                None => return g,
            }
        }
        g
    }

    fn build(&mut self) {
        'outer: loop {
            self.extend_base();
            self.orbits();
            for i in 0..self.levels.len() {
                let fixed: Vec<u32> = self.levels[..i].iter().map(|l| l.point).collect();
                let gens: Vec<Dense> = self.strong.iter().filter(|s| fixed.iter().all(|&b| s[b as usize] == b)).cloned().collect();
                for b in 0..self.points.len() {
                    let Some(ub) = self.levels[i].trans[b].clone() else { continue };
                    for s in &gens {
                        let c = s[b];
                        let uc = self.levels[i].trans[c as usize].as_ref().unwrap();
                        let h = compose(&inverse(uc), &compose(s, &ub));
                        let r = self.sift(h, i);
                        if !is_id(&r) {
                            self.strong.push(r);
                            continue 'outer;
                        }
                    }
                }
            }
            return;
        }
    }

    pub fn contains(&self, p: &Perm) -> bool {
        if p.is_id() {
            return true;
        }
        match self.dense(p) {
            Some(g) => is_id(&self.sift(g, 0)),
            None => false,
        }
    }

    /// Group order, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.trans.iter().filter(|t| t.is_some()).count() as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
    }
}

/// Is `p` in the group generated by `gens`?
pub fn member(p: &Perm, gens: &[Perm]) -> bool {
    p.is_id() || Chain::new(gens).contains(p)
}

/// Drops every generator that the remaining ones already generate,
/// scanning in input order.
pub fn reduce(gens: &[Perm]) -> Vec<Perm> {
    let mut cur: Vec<Perm> = Vec::new();
    for g in gens {
        if !g.is_id() && !cur.contains(g) {
            cur.push(g.clone());
        }
    }
    let mut i = 0;
    while i < cur.len() {
        let rest: Vec<Perm> = cur.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        if member(&cur[i], &rest) {
            cur.remove(i);
        } else {
            i += 1;
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(s: &str) -> Atom {
        Atom::new(s)
    }

    fn sw(a: &str, b: &str) -> Perm {
        Perm::swap(at(a), at(b))
    }

    #[test]
    fn symmetric_group_on_three() {
        let gens = [sw("a", "b"), sw("b", "c")];
        assert!(member(&sw("a", "c"), &gens));
        assert!(member(&Perm::id(), &gens));
        assert_eq!(Chain::new(&gens).order(), 6);
        assert!(!member(&sw("a", "d"), &gens));
    }

    #[test]
    fn double_swap_does_not_contain_single() {
        let g = sw("a", "b").compose(&sw("c", "d"));
        assert!(!member(&sw("a", "b"), &[g.clone()]));
        assert!(member(&g, &[g.clone()]));
        assert_eq!(Chain::new(&[g]).order(), 2);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&[sw("a", "b"), sw("a", "b")]), vec![sw("a", "b")]);
        assert_eq!(reduce(&[sw("a", "b"), sw("b", "c"), sw("a", "c")]).len(), 2);
        assert!(reduce(&[Perm::id()]).is_empty());
    }

    #[test]
    fn large_symmetric_group_order() {
        let names: Vec<String> = (0..8).map(crate::name::canonical_name).collect();
        let cycle = Perm::from_pairs((0..8).map(|i| (at(&names[i]), at(&names[(i + 1) % 8])))).unwrap();
        let chain = Chain::new(&[sw("a", "b"), cycle]);
        assert_eq!(chain.order(), 40320);
    }
}
