//! Unifies the rotated-environment problem in `rotation.prob` and prints every
//! unifier with its stats.

use nomlet::alpha::Mode;
use nomlet::sexp::parse_problem;
use nomlet::unify::{letrec_unify, Config};

fn main() {
    let src = include_str!("rotation.prob");
    let p = parse_problem(src).expect("parse");
    let eqs: Vec<_> = p.eqs.iter().map(|(s, t)| (s.to_expr().unwrap(), t.to_expr().unwrap())).collect();
    let cfg = Config { mode: Mode::Collecting, trace: true, ..Config::default() };
    let out = letrec_unify(&eqs, &[], &cfg).expect("budget");
    for u in &out.unifiers {
        println!("{u}");
        for (x, e) in u.substitution() {
            println!("  {x} := {e}");
        }
    }
    println!("{}", out.stats);
}
