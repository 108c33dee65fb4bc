//! Matches the left-hand side of a beta rule that introduces a letrec.

use nomlet::alpha::Mode;
use nomlet::matching::letrec_match;
use nomlet::sexp::{parse_expr, parse_ground};

fn main() {
    let lhs = parse_expr("(app (lam c ?X1) ?X2)").unwrap();
    let rhs = parse_expr("(letrec ((c ?X2)) ?X1)").unwrap();
    let redex = parse_ground("(app (lam a a) (lam b b))").unwrap();
    let out = letrec_match(&[(lhs, redex.clone())], Mode::Collecting, 10_000).unwrap();
    for s in &out.solutions {
        println!("{s}");
        println!("{redex}  ->  {}", rhs.subst_map(&s.vars));
    }
}
