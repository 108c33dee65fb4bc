//! Finite permutations on atoms in explicit map form.

use crate::name::Atom;
use std::collections::BTreeSet;
use std::fmt;

/// A finite bijection on atoms. Only the moved atoms are stored, sorted by
/// source, so two equal permutations are also structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Perm {
    map: Vec<(Atom, Atom)>,
}

impl Perm {
    pub fn id() -> Perm {
        Perm { map: Vec::new() }
    }

    pub fn swap(a: Atom, b: Atom) -> Perm {
        if a == b {
            return Perm::id();
        }
        let mut map = vec![(a, b), (b, a)];
        map.sort();
        Perm { map }
    }

    /// Composition of a swapping list, applied right to left.
    pub fn from_swaps<I: IntoIterator<Item = (Atom, Atom)>>(swaps: I) -> Perm {
        swaps.into_iter().fold(Perm::id(), |acc, (a, b)| acc.compose(&Perm::swap(a, b)))
    }

    /// Builds a permutation from explicit pairs. Returns `None` unless the
    /// pairs describe a bijection.
    pub fn from_pairs<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Option<Perm> {
        let mut map: Vec<(Atom, Atom)> = pairs.into_iter().filter(|(a, b)| a != b).collect();
        map.sort();
        map.dedup();
        let srcs: BTreeSet<Atom> = map.iter().map(|p| p.0).collect();
        let dsts: BTreeSet<Atom> = map.iter().map(|p| p.1).collect();
        if srcs.len() != map.len() || srcs != dsts {
            return None;
        }
        Some(Perm { map })
    }

    pub fn is_id(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, a: Atom) -> Atom {
        match self.map.binary_search_by(|p| p.0.cmp(&a)) {
            Ok(i) => self.map[i].1,
            Err(_) => a,
        }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        if self.is_id() {
            return other.clone();
        }
        if other.is_id() {
            return self.clone();
        }
        let support: BTreeSet<Atom> = self.domain_iter().chain(other.domain_iter()).collect();
        let map = support.into_iter().map(|a| (a, self.apply(other.apply(a)))).filter(|(a, b)| a != b).collect();
        Perm { map }
    }

    pub fn inverse(&self) -> Perm {
        let mut map: Vec<(Atom, Atom)> = self.map.iter().map(|&(a, b)| (b, a)).collect();
        map.sort();
        Perm { map }
    }

    pub fn domain(&self) -> BTreeSet<Atom> {
        self.domain_iter().collect()
    }

    pub fn domain_iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.map.iter().map(|p| p.0)
    }

    pub fn pairs(&self) -> &[(Atom, Atom)] {
        &self.map
    }

    /// A swapping list of length at most `|dom| - 1` whose composition is
    /// this permutation.
    pub fn swaps(&self) -> Vec<(Atom, Atom)> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for &(start, _) in &self.map {
            if !seen.insert(start) {
                continue;
            }
            let mut cycle = vec![start];
            let mut cur = self.apply(start);
            while cur != start {
                seen.insert(cur);
                cycle.push(cur);
                cur = self.apply(cur);
            }
            // (c0 c1 .. ck) = (c0 ck) .. (c0 c2)(c0 c1), applied right to left
            for &c in cycle[1..].iter().rev() {
                out.push((start, c));
            }
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{a}↦{b}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(s: &str) -> Atom {
        Atom::new(s)
    }

    #[test]
    fn swap_is_involution() {
        let p = Perm::swap(at("a"), at("b"));
        assert!(p.compose(&p).is_id());
        assert_eq!(p.domain(), [at("a"), at("b")].into_iter().collect());
    }

    #[test]
    fn composition_applies_right_first() {
        let p = Perm::from_swaps([(at("a"), at("b")), (at("b"), at("c"))]);
        assert_eq!(p.apply(at("a")), at("b"));
        assert_eq!(p.apply(at("b")), at("c"));
        assert_eq!(p.apply(at("c")), at("a"));
    }

    fn arb_perm() -> impl Strategy<Value = Perm> {
        let names = ["a", "b", "c", "d", "e"];
        prop::collection::vec((0..5usize, 0..5usize), 0..6)
            .prop_map(move |v| Perm::from_swaps(v.into_iter().map(|(i, j)| (at(names[i]), at(names[j])))))
    }

    proptest! {
        #[test]
        fn inverse_cancels(p in arb_perm()) {
            prop_assert!(p.compose(&p.inverse()).is_id());
            prop_assert!(p.inverse().compose(&p).is_id());
        }

        #[test]
        fn swaps_round_trip(p in arb_perm()) {
            let s = p.swaps();
            prop_assert!(s.len() + 1 <= p.domain().len().max(1));
            prop_assert_eq!(Perm::from_swaps(s), p);
        }

        #[test]
        fn composition_associates(p in arb_perm(), q in arb_perm(), r in arb_perm()) {
            prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
        }
    }
}
