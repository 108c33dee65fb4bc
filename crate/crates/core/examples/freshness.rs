//! Reduces freshness constraints to `a # X` form.

use nomlet::freshness::simplify;
use nomlet::name::Atom;
use nomlet::sexp::parse_expr;

fn main() {
    let cases = [
        ("a", "(lam a (f a ?X))"),
        ("a", "(letrec ((b (g a)) (c ?Y)) (perm ((a c)) ?X))"),
        ("a", "(f b (g a))"),
        ("b", "(letrec ((a ?X)) ?Y)"),
    ];
    for (a, e) in cases {
        let e = parse_expr(e).unwrap();
        match simplify([(Atom::new(a), &e)]) {
            Some(cs) => {
                let shown: Vec<String> = cs.iter().map(|(a, x)| format!("{a}#{x}")).collect();
                println!("{a} # {e}  =>  {{{}}}", shown.join(", "));
            }
            None => println!("{a} # {e}  =>  unsatisfiable"),
        }
    }
}
