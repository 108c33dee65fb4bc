//! Group membership through a stabilizer chain.

use nomlet::name::Atom;
use nomlet::perm::Perm;
use nomlet::permgroup::{reduce, Chain};

fn main() {
    let at = |s: &str| Atom::new(s);
    let cycle = Perm::from_swaps([(at("a"), at("b")), (at("b"), at("c")), (at("c"), at("d"))]);
    let swap = Perm::swap(at("a"), at("b"));
    let chain = Chain::new(&[cycle.clone(), swap.clone()]);
    println!("order of <{cycle}, {swap}> = {}", chain.order());
    let probe = Perm::swap(at("c"), at("d"));
    println!("{probe} in group: {}", chain.contains(&probe));

    let gens: Vec<Perm> = (0..6).map(|i| cycle.compose(&if i % 2 == 0 { swap.clone() } else { cycle.clone() })).collect();
    println!("{} generators reduce to {}", gens.len(), reduce(&gens).len());
}
