//! Interned identifiers.
//!
//! Every name is leaked into a process-wide table once, so equality and
//! hashing work on the pointer while ordering still follows the spelling.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{OnceLock, RwLock};

static TABLE: OnceLock<RwLock<HashSet<&'static str>>> = OnceLock::new();

fn intern(s: &str) -> &'static str {
    let table = TABLE.get_or_init(|| RwLock::new(HashSet::new()));
    if let Some(found) = table.read().unwrap().get(s) {
        return found;
    }
    let mut w = table.write().unwrap();
    if let Some(found) = w.get(s) {
        return found;
    }
    let leaked: &'static str = Box::leak(s.to_owned().into_boxed_str());
    w.insert(leaked);
    leaked
}

/// An interned string. Two symbols are equal iff they have the same spelling.
#[derive(Clone, Copy)]
pub struct Sym(&'static str);

impl Sym {
    pub fn new(s: &str) -> Sym {
        Sym(intern(s))
    }

    pub fn as_str(self) -> &'static str {
        self.0
    }
}

impl PartialEq for Sym {
    fn eq(&self, other: &Sym) -> bool {
        std::ptr::eq(self.0.as_ptr(), other.0.as_ptr())
    }
}

impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state)
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Sym) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Sym) -> std::cmp::Ordering {
        if self == other {
            std::cmp::Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

macro_rules! name_kind {
    ($(#[$m:meta])* $name:ident, $prefix:expr) => {
        $(#[$m])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub Sym);

        impl $name {
            pub fn new(s: &str) -> $name {
                $name(Sym::new(s))
            }

            pub fn name(self) -> &'static str {
                self.0.as_str()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{}", $prefix, self.0.as_str())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(self, f)
            }
        }
    };
}

name_kind!(
    /// A concrete object-level name.
    Atom,
    ""
);
name_kind!(
    /// An expression variable, written `?X`.
    Var,
    "?"
);
name_kind!(
    /// A variable ranging over atoms, written `@A`.
    AtomVar,
    "@"
);
name_kind!(
    /// A variable ranging over partial letrec environments, written `%E`.
    EnvVar,
    "%"
);
name_kind!(
    /// A function symbol. Its arity is fixed by the first use.
    Fun,
    ""
);

/// The `i`-th name of the canonical sequence `a, b, .., z, a1, .., z1, a2, ..`.
pub fn canonical_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        k => format!("{letter}{k}"),
    }
}

/// Lowest atom of the canonical sequence that is not in `avoid`.
pub fn fresh_atom<'a, I>(avoid: I) -> Atom
where
    I: IntoIterator<Item = &'a Atom>,
{
    let taken: HashSet<Atom> = avoid.into_iter().copied().collect();
    (0..).map(|i| Atom::new(&canonical_name(i))).find(|a| !taken.contains(a)).unwrap()
}

/// Hands out atoms that avoid a fixed set and each other.
#[derive(Clone, Debug, Default)]
pub struct AtomSupply {
    taken: HashSet<Atom>,
    next: usize,
}

impl AtomSupply {
    pub fn avoiding<'a, I: IntoIterator<Item = &'a Atom>>(avoid: I) -> AtomSupply {
        AtomSupply { taken: avoid.into_iter().copied().collect(), next: 0 }
    }

    pub fn avoid(&mut self, a: Atom) {
        self.taken.insert(a);
    }

    pub fn fresh(&mut self) -> Atom {
        loop {
            let a = Atom::new(&canonical_name(self.next));
            self.next += 1;
            if self.taken.insert(a) {
                return a;
            }
        }
    }
}

/// Hands out expression variables `?_1`, `?_2`, .. that avoid a fixed set.
#[derive(Clone, Debug, Default)]
pub struct VarSupply {
    taken: HashSet<Var>,
    next: usize,
}

impl VarSupply {
    pub fn avoiding<'a, I: IntoIterator<Item = &'a Var>>(avoid: I) -> VarSupply {
        VarSupply { taken: avoid.into_iter().copied().collect(), next: 0 }
    }

    pub fn fresh(&mut self) -> Var {
        loop {
            self.next += 1;
            let v = Var::new(&format!("_{}", self.next));
            if self.taken.insert(v) {
                return v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_atom_skips_taken_names() {
        let a = Atom::new("a");
        let b = Atom::new("b");
        assert_eq!(fresh_atom(&[a, b]), Atom::new("c"));
        assert_eq!(fresh_atom(&[]), a);
        let all: Vec<Atom> = (0..26).map(|i| Atom::new(&canonical_name(i))).collect();
        assert_eq!(fresh_atom(&all), Atom::new("a1"));
    }

    #[test]
    fn ordering_follows_spelling() {
        let z = Atom::new("zz");
        let a = Atom::new("aa");
        assert!(a < z);
        assert_eq!(Atom::new("aa"), a);
    }
}
