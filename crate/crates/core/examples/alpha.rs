//! Alpha-equivalence with letrec, and why garbage matters.

use nomlet::alpha::alpha_eq;
use nomlet::name::Atom;
use nomlet::perm::Perm;
use nomlet::sexp::parse_ground;

fn main() {
    let pairs = [
        ("(letrec ((a (cons s b)) (b (cons t a))) a)", "(letrec ((x (cons s y)) (y (cons t x))) x)"),
        ("(letrec ((a (cons s b)) (b (cons t a))) a)", "(letrec ((x (cons t y)) (y (cons s x))) x)"),
        ("(lam a (lam b (f a b)))", "(lam b (lam a (f b a)))"),
    ];
    for (l, r) in pairs {
        let (l, r) = (parse_ground(l).unwrap(), parse_ground(r).unwrap());
        println!("{l}\n{r}\n  => {}", alpha_eq(&l, &r));
    }

    // a and b occur free, yet swapping them changes nothing
    let e = parse_ground("(letrec ((c a) (d b)) True)").unwrap();
    let swapped = e.permute(&Perm::swap(Atom::new("a"), Atom::new("b")));
    println!("{swapped} ~ {e}: {}", alpha_eq(&swapped, &e));
    println!("garbage-free: {}, collected: {}", e.is_garbage_free(), e.collect_garbage());
}
