//! Fixpoint equations multiply under FPS unless redundant ones are dropped
//! by a group-membership test.

use nomlet::alpha::Mode;
use nomlet::name::Var;
use nomlet::unify::{fixpoint_family, letrec_unify, problem_size, Config};

fn main() {
    println!("{:>3} {:>5} {:>12} {:>10}", "n", "size", "without", "with");
    for n in 3..=8 {
        let eqs = fixpoint_family(n);
        let count = |elim_fp| {
            let cfg = Config { mode: Mode::Decision, elim_fp, ..Config::default() };
            let out = letrec_unify(&eqs, &[], &cfg).unwrap();
            let x1 = Var::new("X1");
            out.unifiers[0].fix.iter().filter(|(x, _)| *x == x1).count()
        };
        println!("{n:>3} {:>5} {:>12} {:>10}", problem_size(&eqs), count(false), count(true));
    }
}
