//! Long compositions of swaps over atom variables stay small in the grammar.

use nomlet::av::{Assign, Grammar, GW};
use nomlet::name::{Atom, AtomVar};
use nomlet::syntax::V;

fn main() {
    let mut g = Grammar::new();
    let vs: Vec<GW> = ["A", "B", "C"].iter().map(|s| GW::plain(V::Var(AtomVar::new(s)))).collect();
    let mut p = g.id();
    for i in 0..40 {
        let s = g.swap(vs[i % 3].clone(), vs[(i + 1) % 3].clone());
        p = g.compose(s, p);
    }
    println!("{} nonterminals after 40 compositions", g.len());
    let assign: Assign = [("A", "a"), ("B", "b"), ("C", "c")].iter().map(|(v, a)| (AtomVar::new(v), Atom::new(a))).collect();
    let ev = g.eval(p, &assign).unwrap();
    let inv = g.eval(g.inverse(p), &assign).unwrap();
    println!("value {ev}, inverse {inv}, product is identity: {}", ev.compose(&inv).is_id());
}
