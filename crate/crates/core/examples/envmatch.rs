//! Environment variables capture whole groups of bindings.

use nomlet::alpha::Mode;
use nomlet::envmatch::env_match;
use nomlet::sexp::{parse_ground, parse_term};

fn main() {
    let pat = parse_term("(letrec (%E1) (letrec (%E2) ?X))").unwrap();
    let tgt = parse_ground("(letrec ((a 0) (b 1)) (letrec ((c (t a b c))) c))").unwrap();
    let out = env_match(&[(pat, tgt)], &[], Mode::Collecting, 100_000).unwrap();
    for s in &out.solutions {
        println!("{s}");
    }
    println!("states {} guesses {}", out.states, out.guesses);

    let pat = parse_term("(letrec ((@A ?Y) %E) @A)").unwrap();
    let tgt = parse_ground("(letrec ((u (g v)) (v 0)) v)").unwrap();
    for s in env_match(&[(pat, tgt)], &[], Mode::Collecting, 100_000).unwrap().solutions {
        println!("{s}");
    }
}
